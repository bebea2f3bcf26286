"""Time and photon budgets for locally preparing the encoded star-like and
complete-like cluster states from GHZ seeds and type-II fusions.

The photon counts are upper bounds that depend on an unspecified polynomial
``poly``; :class:`Polynomial` makes that choice explicit and configurable.
None of these counts enter the repeater's headline photon budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .tree import TreeLike, as_tree


@dataclass(frozen=True)
class SourceDetectorParams:
    eta_s: float
    eta_d: float
    tau_a: float
    p_tau_a: float

    def __post_init__(self):
        for name in ("eta_s", "eta_d", "p_tau_a"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.tau_a < 0.0:
            raise ValueError(f"tau_a must be non-negative, got {self.tau_a}")

    @property
    def eta(self) -> float:
        return self.eta_s * self.eta_d


@dataclass(frozen=True)
class Polynomial:
    """``poly(x) = sum_i coefficients[i] * x**i``; the default is ``poly(x) = x``."""

    coefficients: tuple[float, ...] = (0.0, 1.0)

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


@dataclass(frozen=True)
class PrepEstimate:
    """Preparation diagnostics; photon counts are bounds under ``poly``."""

    tau_s: float
    tau_c: float
    p2_lower: float
    p2_upper: float
    q_s_bound: float
    q_c_bound: float
    ghz_success: float
    ghz_effective_loss: float
    poly: Polynomial


def prep_steps_star(m: int, tree: TreeLike) -> float:
    """Star-state preparation time in units of ``tau_a``."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    tree = as_tree(tree)
    return math.log2(2 * m) + sum(math.log2(b) for b in tree.branches) + tree.depth + 4


def prep_time_star(m: int, tree: TreeLike, tau_a: float) -> float:
    return prep_steps_star(m, tree) * tau_a


def prep_time_complete(tau_s: float, tau_a: float) -> float:
    return tau_s + tau_a


def ghz_source_stats(params: SourceDetectorParams) -> tuple[float, float]:
    """(success probability, effective per-photon loss) of the 3-photon GHZ source."""
    eta = params.eta
    success = eta**3 * (2.0 - eta) ** 3 / 32.0
    loss = 1.0 - params.eta_s / (2.0 - eta)
    return success, loss


def fusion_success_bounds(params: SourceDetectorParams, steps: float) -> tuple[float, float]:
    """Lower/upper bounds on the type-II fusion success probability.

    ``steps`` is the exponent of the per-step survival probability in the
    lower bound, ``2 * tau_s / tau_a``.
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    eta = params.eta
    upper = eta**2 / (2.0 * (2.0 - eta) ** 2)
    return upper * params.p_tau_a**steps, upper


def star_state_photon_bound(
    m: int, tree: TreeLike, params: SourceDetectorParams, p2: float, poly: Polynomial = Polynomial()
) -> float:
    """Upper bound on the photons consumed to build the encoded star-like state."""
    if not 0.0 < p2 <= 1.0:
        raise ZeroDivisionError(f"fusion success probability must lie in (0, 1], got {p2}")
    tree = as_tree(tree)
    eta = params.eta
    prefactor = 2 * 6 * 32 / (eta**3 * (2.0 - eta) ** 3)
    fusion = p2 ** -(2 * tree.depth + 4)
    product = math.prod(poly(b) for b in tree.branches)
    return prefactor * fusion * poly(2 * m) * product


def complete_state_photon_bound(q_s: float, m: int, params: SourceDetectorParams, prep_steps: float) -> float:
    """Photon bound for the complete-like state from the star-state bound ``q_s``.

    ``prep_steps`` is ``tau_s / tau_a``.
    """
    eta = params.eta
    factor = (2.0 - eta) / (eta * params.p_tau_a**prep_steps)
    return factor ** (4 * m + 2) * q_s


def prep_estimate(m: int, tree: TreeLike, params: SourceDetectorParams, poly: Polynomial = Polynomial()) -> PrepEstimate:
    steps = prep_steps_star(m, tree)
    tau_s = steps * params.tau_a
    lower, upper = fusion_success_bounds(params, 2.0 * steps)
    ghz_p, ghz_loss = ghz_source_stats(params)
    q_s = star_state_photon_bound(m, tree, params, lower, poly)
    return PrepEstimate(
        tau_s=tau_s,
        tau_c=prep_time_complete(tau_s, params.tau_a),
        p2_lower=lower,
        p2_upper=upper,
        q_s_bound=q_s,
        q_c_bound=complete_state_photon_bound(q_s, m, params, steps),
        ghz_success=ghz_p,
        ghz_effective_loss=ghz_loss,
        poly=poly,
    )
