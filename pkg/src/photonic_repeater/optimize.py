"""Exhaustive grid search over ``(m, b_0, ..., b_l)`` minimising the photon
cost per delivered pair.

Photon cost, rate and loss are computed for the whole grid at once.  The
candidates are then visited in increasing cost order (ties broken by the
lexicographically smallest configuration) and fully evaluated until one
meets every constraint, so the first feasible visit is the grid optimum.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .repeater import (
    HardwareParams,
    LinkParams,
    ProtocolConfig,
    RepeaterMetrics,
    StageError,
    _effective_loss,
    _log_trial_success,
    evaluate,
)
from .tree import TreeParams, failure_profile_array

MAX_CANDIDATES = 10**8
_CHUNK = 1 << 18
FRONTIER_SIZE = 25


@dataclass(frozen=True)
class Constraints:
    min_fidelity: Optional[float] = None
    min_rate: Optional[float] = None
    max_epsilon0: Optional[float] = None

    def satisfied_by(self, metrics: RepeaterMetrics) -> bool:
        if self.min_fidelity is not None and not metrics.fidelity >= self.min_fidelity:
            return False
        if self.min_rate is not None and not metrics.rate >= self.min_rate:
            return False
        if self.max_epsilon0 is not None and not metrics.epsilon0 <= self.max_epsilon0:
            return False
        return True


@dataclass(frozen=True)
class SearchSpace:
    """Inclusive integer ranges for ``m`` and for every branching level."""

    m_range: tuple[int, int]
    branch_ranges: tuple[tuple[int, int], ...]
    constraints: Constraints = field(default_factory=Constraints)

    def __post_init__(self):
        m_range = tuple(int(v) for v in self.m_range)
        ranges = tuple(tuple(int(v) for v in r) for r in self.branch_ranges)
        if len(m_range) != 2 or m_range[0] > m_range[1] or m_range[0] < 1:
            raise ValueError(f"invalid m_range {self.m_range}")
        if not ranges:
            raise ValueError("depth must be >= 1 (at least one branch range)")
        for r in ranges:
            if len(r) != 2 or r[0] > r[1] or r[0] < 1:
                raise ValueError(f"invalid branch range {r}")
        object.__setattr__(self, "m_range", m_range)
        object.__setattr__(self, "branch_ranges", ranges)

    @classmethod
    def pinned(cls, m: int, branches: Sequence[int], constraints: Constraints = Constraints()) -> "SearchSpace":
        return cls((m, m), tuple((b, b) for b in branches), constraints)

    @property
    def depth(self) -> int:
        return len(self.branch_ranges)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(hi - lo + 1 for lo, hi in (self.m_range, *self.branch_ranges))

    @property
    def size(self) -> int:
        return math.prod(self.shape)


@dataclass(frozen=True)
class SearchResult:
    """``feasible`` is False when no candidate met the constraints; ``best_*`` then
    describe the cheapest infeasible candidate (or are ``None`` if nothing could
    be evaluated at all)."""

    feasible: bool
    best_config: Optional[ProtocolConfig]
    best_metrics: Optional[RepeaterMetrics]
    frontier: list[tuple[ProtocolConfig, RepeaterMetrics]]
    candidates: int
    evaluated: int
    message: str = ""


def _decode(space: SearchSpace, flat: np.ndarray) -> np.ndarray:
    """Flat indices -> ``(N, depth + 1)`` array of ``(m, b_0, ..., b_l)``."""
    idx = np.unravel_index(flat, space.shape)
    lows = [space.m_range[0]] + [r[0] for r in space.branch_ranges]
    return np.stack([i + lo for i, lo in zip(idx, lows)], axis=1)


def grid_costs(space: SearchSpace, hardware: HardwareParams, link: LinkParams, start: int = 0, stop: Optional[int] = None):
    """Photon cost, rate and loss for flat candidate indices ``start:stop``.

    Returns ``(q_bar, rate, eps)``; ``q_bar`` is ``inf`` where the trial can
    never succeed or ``eps >= 0.5``.
    """
    stop = space.size if stop is None else stop
    params = _decode(space, np.arange(start, stop))
    m = params[:, 0].astype(float)
    branches = params[:, 1:]
    steps = np.log2(2.0 * m) + np.log2(branches).sum(axis=1) + (space.depth - 1) + 4
    eps = _effective_loss(link.L0, steps, hardware)
    fail = failure_profile_array(eps, branches)
    with np.errstate(divide="ignore", invalid="ignore"):
        fail_z = -np.expm1(branches[:, 0] * np.log1p(-eps * fail[1]))
    fail_z = np.where(eps == 0.0, 0.0, fail_z)
    n = link.n
    p_b = (1.0 - eps) ** 2 / 2.0
    with np.errstate(over="ignore"):
        p = np.exp(_log_trial_success(fail_z, fail[0], p_b, m, n))
    layer = np.cumprod(branches, axis=1)
    q_l = layer.sum(axis=1)
    per_trial = 2 * params[:, 0] * n * (q_l + 1) + 2 * params[:, 0]
    with np.errstate(divide="ignore"):
        q_bar = np.where(p > 0, per_trial / p, np.inf)
    q_bar = np.where(eps >= 0.5, np.inf, q_bar)
    return q_bar, p * hardware.f, eps


def _all_costs(space, hardware, link, threads: int):
    bounds = [(s, min(s + _CHUNK, space.size)) for s in range(0, space.size, _CHUNK)]
    if threads and threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: grid_costs(space, hardware, link, *b), bounds))
    else:
        parts = [grid_costs(space, hardware, link, *b) for b in bounds]
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


def optimize(
    space: SearchSpace,
    hardware: HardwareParams,
    link: LinkParams,
    threads: int = 1,
    frontier_size: int = FRONTIER_SIZE,
) -> SearchResult:
    """Minimise the mean photon cost per pair over the grid ``space``."""
    if space.size > MAX_CANDIDATES:
        raise ValueError(f"search space has {space.size} candidates (limit {MAX_CANDIDATES})")
    if not math.isclose(link.L / link.L0, round(link.L / link.L0), rel_tol=1e-9):
        warnings.warn(f"L/L0 = {link.L / link.L0:.6g} is not an integer; using the rounded node count", stacklevel=2)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        q_bar, rate, eps = _all_costs(space, hardware, link, threads)
    c = space.constraints
    cheap_ok = np.isfinite(q_bar)
    if c.min_rate is not None:
        cheap_ok &= rate >= c.min_rate
    if c.max_epsilon0 is not None:
        cheap_ok &= eps <= c.max_epsilon0
    # stable sort on cost keeps the lexicographic enumeration order among ties
    order = np.argsort(q_bar, kind="stable")

    frontier: list[tuple[ProtocolConfig, RepeaterMetrics]] = []
    best_infeasible = None
    evaluated = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for flat in order:
            if not np.isfinite(q_bar[flat]):
                break
            config = _config_at(space, int(flat), hardware, link)
            if not cheap_ok[flat]:
                if best_infeasible is None:
                    best_infeasible = config
                continue
            try:
                metrics = evaluate(config)
            except StageError:
                continue
            evaluated += 1
            if len(frontier) < frontier_size:
                frontier.append((config, metrics))
            if c.satisfied_by(metrics):
                return SearchResult(True, config, metrics, frontier, space.size, evaluated, "ok")
            if best_infeasible is None:
                best_infeasible = config

    best_metrics = None
    if best_infeasible is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                best_metrics = evaluate(best_infeasible)
            except StageError:
                best_metrics = None
    return SearchResult(
        False, best_infeasible, best_metrics, frontier, space.size, evaluated, "no candidate satisfies the constraints"
    )


def _config_at(space: SearchSpace, flat: int, hardware, link) -> ProtocolConfig:
    row = _decode(space, np.array([flat]))[0]
    return ProtocolConfig(m=int(row[0]), tree=TreeParams(tuple(int(b) for b in row[1:])), hardware=hardware, link=link)


@dataclass(frozen=True)
class SweepRow:
    L: float
    L0: float
    e_d: float
    result: Optional[SearchResult]
    error: str = ""

    @property
    def status(self) -> str:
        if self.result is None:
            return "error"
        return "optimal" if self.result.feasible else "infeasible"


def sweep(
    grid: Sequence[Sequence[float]],
    space: SearchSpace,
    hardware: HardwareParams,
    e_d: float = 0.0,
    threads: int = 1,
) -> list[SweepRow]:
    """Optimise every cell of ``grid`` in order; failures are recorded in their row.

    Cells are ``(L, L0)`` or ``(L, L0, e_d)``; the shorter form uses ``e_d``.
    """
    rows = []
    for cell in grid:
        L, L0 = float(cell[0]), float(cell[1])
        cell_e_d = float(cell[2]) if len(cell) > 2 else e_d
        try:
            link = LinkParams(L=L, L0=L0, e_d=cell_e_d)
            result = optimize(space, hardware, link, threads=threads)
            rows.append(SweepRow(L, L0, cell_e_d, result))
        except (ValueError, ArithmeticError, StageError) as exc:
            rows.append(SweepRow(L, L0, cell_e_d, None, f"{type(exc).__name__}: {exc}"))
    return rows


def with_constraints(space: SearchSpace, **kwargs) -> SearchSpace:
    return replace(space, constraints=replace(space.constraints, **kwargs))
