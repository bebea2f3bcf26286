"""Stabilizer-tableau oracle for the graph-state identities of the protocol."""
from .checks import (
    ERROR_SCENARIOS,
    Verdict,
    check_bell_equivalence,
    check_error_propagation,
    check_rule_xx_contraction,
    check_rule_z_removal,
    check_star_to_complete,
    run_all,
)
from .tableau import Pauli, QubitCapError, StabilizerTableau, graph_state, measure_pauli, pauli_correction

__all__ = [
    "ERROR_SCENARIOS",
    "Pauli",
    "QubitCapError",
    "StabilizerTableau",
    "Verdict",
    "check_bell_equivalence",
    "check_error_propagation",
    "check_rule_xx_contraction",
    "check_rule_z_removal",
    "check_star_to_complete",
    "graph_state",
    "measure_pauli",
    "pauli_correction",
    "run_all",
]
