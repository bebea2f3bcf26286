"""Monte Carlo oracles for the tree measurement and the repeater chain."""
from ._accel import ENV_FLAG, HAVE_NUMBA
from .kernels import tree_measurement_kernel
from .validator import (
    Comparison,
    McEstimate,
    McSettings,
    SMALL_TREE_SUITE,
    RepeaterEstimates,
    compare,
    mc_repeater_trial,
    mc_tree_measurement,
    repeater_comparisons,
    repeater_trial_counts,
    split_half,
    split_half_agreement,
    tree_comparisons,
    tree_measurement_counts,
)

__all__ = [
    "ENV_FLAG",
    "HAVE_NUMBA",
    "Comparison",
    "McEstimate",
    "McSettings",
    "RepeaterEstimates",
    "SMALL_TREE_SUITE",
    "compare",
    "mc_repeater_trial",
    "mc_tree_measurement",
    "repeater_comparisons",
    "repeater_trial_counts",
    "split_half",
    "split_half_agreement",
    "tree_comparisons",
    "tree_measurement_counts",
    "tree_measurement_kernel",
]
