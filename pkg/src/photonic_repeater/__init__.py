"""Performance model and cross-checks for all-photonic quantum repeaters."""
