"""End-to-end analytic model of the all-photonic repeater chain.

Geometry: Alice and Bob are ``L`` km apart, with ``n`` source nodes and
``n + 1`` receiver nodes alternating every ``L0 / 2`` km, so ``n + 1 = L / L0``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import prep
from .tree import TreeLike, TreeMetrics, TreeParams, as_tree, tree_metrics, tree_qubit_count
from .units import seconds_to_years, travel_distance_km, travel_time


class StageError(RuntimeError):
    """A computation failed; ``stage`` names the step of the evaluation chain."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class HardwareParams:
    eta_s: float
    eta_d: float
    tau_a: float = 150e-9
    f: float = 100e3
    c: float = 2e8
    l_att: float = 22.0

    def __post_init__(self):
        for name in ("eta_s", "eta_d"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.tau_a < 0:
            raise ValueError("tau_a must be non-negative")
        for name in ("f", "c", "l_att"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def eta(self) -> float:
        return self.eta_s * self.eta_d


@dataclass(frozen=True)
class LinkParams:
    """``e_d`` is the depolarizing error of one ``L0 / 2`` fiber segment."""

    L: float
    L0: float
    e_d: float = 0.0

    def __post_init__(self):
        if not 0 < self.L0 <= self.L:
            raise ValueError(f"need 0 < L0 <= L, got L0={self.L0}, L={self.L}")
        if not 0.0 <= self.e_d <= 0.75:
            raise ValueError(f"e_d must lie in [0, 0.75], got {self.e_d}")

    @property
    def n(self) -> int:
        """Number of source nodes, ``round(L / L0) - 1``."""
        ratio = self.L / self.L0
        nodes = round(ratio)
        if not math.isclose(ratio, nodes, rel_tol=1e-9):
            warnings.warn(
                f"L/L0 = {ratio:.6g} is not an integer; using {nodes} receiver nodes",
                stacklevel=2,
            )
        return max(nodes, 1) - 1

    @property
    def e_m(self) -> float:
        return 2.0 * self.e_d / 3.0


@dataclass(frozen=True)
class ProtocolConfig:
    m: int
    tree: TreeParams
    hardware: HardwareParams
    link: LinkParams

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        object.__setattr__(self, "tree", as_tree(self.tree))


@dataclass(frozen=True)
class PairErrors:
    e_x: float
    e_y: float
    e_z: float
    fidelity: float


@dataclass(frozen=True)
class RepeaterMetrics:
    epsilon0: float
    p_b: float
    p: float
    rate: float
    q_bar: float
    e_x: float
    e_y: float
    e_z: float
    fidelity: float
    t_max: float
    t_mem_a: float
    t_mem_b: float
    n: int
    m: int
    e_m: float
    photons_per_trial: int
    tau_s: float
    tau_c: float
    tree: TreeMetrics = field(repr=False)


def compose_depolarizing(e_d: float, segments: int) -> float:
    """Error of ``segments`` identical depolarizing channels in series."""
    if segments < 1:
        raise ValueError("segments must be >= 1")
    shrink = 1.0 - 4.0 * e_d / 3.0
    return 0.75 * (1.0 - shrink**segments)


def survival_per_step(hw: HardwareParams) -> float:
    """Probability that a photon survives one ``tau_a`` step stored in fiber."""
    return math.exp(-travel_distance_km(hw.tau_a, hw.c) / hw.l_att)


def _effective_loss(L0, prep_steps, hw: HardwareParams):
    # exponent of the per-step survival is (tau_c + 2 tau_a) / tau_a = prep_steps + 3
    log_keep = -L0 / (2.0 * hw.l_att) - travel_distance_km(hw.tau_a, hw.c) / hw.l_att * (prep_steps + 3.0)
    eta = hw.eta
    return 1.0 - np.exp(log_keep) * eta / (2.0 - eta)


def effective_loss(config: ProtocolConfig) -> float:
    """Per-photon loss from preparation time, half-link fiber and devices."""
    steps = prep.prep_steps_star(config.m, config.tree)
    return float(_effective_loss(config.link.L0, steps, config.hardware))


def bell_success(epsilon0: float) -> float:
    return (1.0 - epsilon0) ** 2 / 2.0


def _log_trial_success(fail_z, fail_x, p_b, m, n):
    with np.errstate(divide="ignore"):
        log_pz = np.log1p(-fail_z)
        log_px = np.log1p(-fail_x)
        node_fail = np.exp(m * np.log1p(-p_b))
        log_node = np.log1p(-node_fail)
        return 2.0 * (m - 1) * n * log_pz + 2.0 * n * log_px + (n + 1) * log_node


def trial_success(p_z: float, p_x: float, p_b: float, m: int, n: int) -> float:
    """Probability that one trial of the whole chain succeeds."""
    for name, value in (("p_z", p_z), ("p_x", p_x), ("p_b", p_b)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    if p_b == 1.0:
        return p_z ** (2 * (m - 1) * n) * p_x ** (2 * n)
    return float(np.exp(_log_trial_success(1.0 - p_z, 1.0 - p_x, p_b, m, n)))


def pair_rate(p: float, f: float) -> float:
    return p * f


def photons_per_trial(m: int, n: int, q_l: int) -> int:
    """Photons emitted per trial: ``2 m n (Q_L + 1) + 2 m``."""
    return 2 * m * n * (q_l + 1) + 2 * m


def photons_per_pair(m: int, n: int, q_l: int, p: float) -> float:
    """Mean photons per delivered pair; ``math.inf`` when ``p == 0``."""
    if p <= 0.0:
        return math.inf
    return photons_per_trial(m, n, q_l) / p


def max_photon_lifetime(tau_c: float, tau_a: float, L0: float, c: float) -> float:
    return tau_c + travel_time(L0 / 2.0, c) + 2.0 * tau_a


def memory_time(strategy: str, L: float, L0: float, c: float, tau_a: float) -> float:
    """Quantum-memory time needed for teleportation over the chain.

    Strategy ``"a"`` forces ``P ~ 1`` and waits only for Alice's classical
    message; ``"b"`` additionally waits for the success heralds.
    """
    tag = str(strategy).lower()
    if tag == "a":
        return travel_time(L0 / 2.0, c) + 2.0 * tau_a + travel_time(L, c)
    if tag == "b":
        return 2.0 * tau_a + 2.0 * travel_time(L, c)
    raise ValueError(f"unknown memory strategy {strategy!r}; expected 'a' or 'b'")


def final_pair_errors(e_m: float, e_x_bar: float, e_z_bar: float, m: int, n: int) -> PairErrors:
    """Pauli error rates and fidelity of the delivered pair."""
    log_dep = 2 * (n + 1) * math.log1p(-2.0 * e_m) if e_m < 0.5 else -math.inf
    log_x = n * math.log1p(-2.0 * e_x_bar) if e_x_bar < 0.5 else -math.inf
    log_z = (2 * m - 2) * n * math.log1p(-2.0 * e_z_bar) if e_z_bar < 0.5 else -math.inf
    if (2 * m - 2) * n == 0:
        log_z = 0.0
    if n == 0:
        log_x = 0.0
    # transfer factors: lambda_y = d a^2, lambda_x = lambda_z = d a c
    log_ly = log_dep + 2.0 * log_x
    log_lxz = log_dep + log_x + log_z
    e_x = -math.expm1(log_ly) / 4.0
    one_minus_lxz = -math.expm1(log_lxz)
    # 1 + l_y - 2 l_xz = (1 - l_xz) - (l_xz - l_y)
    gap = math.exp(log_dep + log_x) * (math.exp(log_z) - math.exp(log_x)) if math.isfinite(log_dep + log_x) else 0.0
    e_y = (one_minus_lxz - gap) / 4.0
    e_z = e_x
    return PairErrors(e_x=e_x, e_y=e_y, e_z=e_z, fidelity=1.0 - e_x - e_y - e_z)


def scaling_upper_bound(n: int, p_b: float, x: float) -> tuple[float, float]:
    """Closed-form photon bound with the tree size replaced by the empirical
    ``(ln 1/(1 - P_L))**4.5`` scaling; returns ``(m_choice, q_upp)``."""
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    if not 0.0 < p_b < 1.0:
        raise ValueError(f"p_b must lie in (0, 1), got {p_b}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    log_fail = math.log1p(-p_b)
    m_choice = math.log(2 * x / (2 * x + n + 1)) / log_fail
    q_l = math.log(1.0 / -math.expm1(x / n * log_fail)) ** 4.5
    q_upp = (
        2.0
        * (n * (q_l + 1.0) + 1.0)
        * (1.0 + (n + 1) / (2.0 * x)) ** (2.0 * x)
        * (1.0 + 2.0 * x / (n + 1)) ** (n + 1)
        * m_choice
    )
    return m_choice, q_upp


def direct_transmission_cost(L: float, source_rate: float, l_att: float) -> tuple[float, float]:
    """Photons and seconds to share one pair by sending photons over the whole distance."""
    photons = math.exp(L / l_att)
    return photons, photons / source_rate


def direct_transmission_years(L: float, source_rate: float, l_att: float) -> float:
    return seconds_to_years(direct_transmission_cost(L, source_rate, l_att)[1])


def evaluate(config: ProtocolConfig, tree_stats: Optional[TreeMetrics] = None) -> RepeaterMetrics:
    """Run the full analytic chain for one protocol configuration."""
    hw, link, m, tree = config.hardware, config.link, config.m, config.tree
    stage = "prep_time"
    try:
        steps = prep.prep_steps_star(m, tree)
        tau_s = steps * hw.tau_a
        tau_c = prep.prep_time_complete(tau_s, hw.tau_a)
        stage = "effective_loss"
        eps = float(_effective_loss(link.L0, steps, hw))
        if eps >= 0.5:
            warnings.warn(f"epsilon0 = {eps:.4f} >= 0.5: loss tolerance cannot be reached", stacklevel=2)
        stage = "tree_metrics"
        n = link.n
        e_m = link.e_m
        tm = tree_stats if tree_stats is not None else tree_metrics(tree, eps, e_m)
        stage = "trial_success"
        p_b = bell_success(eps)
        p = float(np.exp(_log_trial_success(tm.fail_z, tm.fail_x, p_b, m, n)))
        stage = "photon_budget"
        per_trial = photons_per_trial(m, n, tm.q_l)
        q_bar = photons_per_pair(m, n, tm.q_l, p)
        stage = "pair_errors"
        if tm.e_x is None:
            raise ValueError("X-measurement error undefined (P_X = 0)")
        errors = final_pair_errors(e_m, tm.e_x, tm.e_z, m, n)
        stage = "timing"
        t_max = max_photon_lifetime(tau_c, hw.tau_a, link.L0, hw.c)
        t_mem_a = memory_time("a", link.L, link.L0, hw.c, hw.tau_a)
        t_mem_b = memory_time("b", link.L, link.L0, hw.c, hw.tau_a)
    except StageError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise StageError(stage, str(exc)) from exc
    return RepeaterMetrics(
        epsilon0=eps,
        p_b=p_b,
        p=p,
        rate=pair_rate(p, hw.f),
        q_bar=q_bar,
        e_x=errors.e_x,
        e_y=errors.e_y,
        e_z=errors.e_z,
        fidelity=errors.fidelity,
        t_max=t_max,
        t_mem_a=t_mem_a,
        t_mem_b=t_mem_b,
        n=n,
        m=m,
        e_m=e_m,
        photons_per_trial=per_trial,
        tau_s=tau_s,
        tau_c=tau_c,
        tree=tm,
    )


def source_detector_params(hw: HardwareParams) -> prep.SourceDetectorParams:
    return prep.SourceDetectorParams(eta_s=hw.eta_s, eta_d=hw.eta_d, tau_a=hw.tau_a, p_tau_a=survival_per_step(hw))


def make_config(m: int, tree: TreeLike, hardware: HardwareParams, link: LinkParams) -> ProtocolConfig:
    return ProtocolConfig(m=m, tree=as_tree(tree), hardware=hardware, link=link)


__all__ = [
    "HardwareParams",
    "LinkParams",
    "ProtocolConfig",
    "RepeaterMetrics",
    "PairErrors",
    "StageError",
    "bell_success",
    "compose_depolarizing",
    "direct_transmission_cost",
    "direct_transmission_years",
    "effective_loss",
    "evaluate",
    "final_pair_errors",
    "make_config",
    "max_photon_lifetime",
    "memory_time",
    "pair_rate",
    "photons_per_pair",
    "photons_per_trial",
    "scaling_upper_bound",
    "source_detector_params",
    "survival_per_step",
    "trial_success",
    "tree_qubit_count",
]
