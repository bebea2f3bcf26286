"""Monte Carlo estimates of the tree and repeater statistics.

Every sampler splits its trials into fixed blocks with their own random
stream (see :mod:`.rng`) and reduces per-block integer counts, so the
result depends only on ``(inputs, seed, trials)`` and never on threading.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..repeater import ProtocolConfig, bell_success, evaluate
from ..tree import TreeLike, TreeMetrics, as_tree, tree_metrics, tree_qubit_count
from .kernels import BASIS_X, BASIS_Z, tree_measurement_kernel
from .rng import BLOCK_SIZE, block_generator, block_sizes, stream_tag

_PHYSICAL_CELLS = 1 << 23
_PHYSICAL_MAX_NODES = 16

#: ``(branches, epsilon0, e_m)`` cases small enough that tree failures are observable.
SMALL_TREE_SUITE = tuple(
    (branches, eps, e_m)
    for branches in ((2, 2), (4, 4, 1), (1, 1))
    for eps in (0.2, 0.3, 0.4)
    for e_m in (0.0, 1e-3, 1e-2)
)


@dataclass(frozen=True)
class McSettings:
    trials: int
    seed: int = 0
    confidence_sigma: float = 3.0
    threads: int = 1
    backend: str = "auto"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.confidence_sigma > 0:
            raise ValueError("confidence_sigma must be positive")


@dataclass(frozen=True)
class McEstimate:
    """Binomial proportion estimate; ``std_error = sqrt(mean (1 - mean) / trials)``."""

    mean: float
    std_error: float
    trials: int
    quantity_tag: str

    @classmethod
    def from_counts(cls, hits: int, trials: int, tag: str) -> "McEstimate":
        if trials == 0:
            return cls(math.nan, math.nan, 0, tag)
        mean = hits / trials
        return cls(mean, math.sqrt(mean * (1.0 - mean) / trials), int(trials), tag)


@dataclass(frozen=True)
class Comparison:
    quantity_tag: str
    analytic: float
    mean: float
    std_error: float
    sigma: float
    consistent: bool
    trials: int = 0

    @property
    def verdict(self) -> str:
        return "consistent" if self.consistent else "inconsistent"

    @property
    def z_score(self) -> float:
        if self.std_error > 0:
            return (self.mean - self.analytic) / self.std_error
        return 0.0 if self.mean == self.analytic else math.inf


def compare(analytic: float, empirical: McEstimate, sigma: float = 3.0) -> Comparison:
    """Consistent iff ``|analytic - mean| <= sigma * std_error``.

    A zero-variance estimate (all trials agree) is consistent only on exact
    equality; an estimate with no trials is never consistent.
    """
    mean, se = empirical.mean, empirical.std_error
    if empirical.trials == 0 or math.isnan(mean):
        ok = False
    elif se == 0.0:
        ok = analytic == mean
    else:
        ok = abs(analytic - mean) <= sigma * se
    return Comparison(empirical.quantity_tag, analytic, mean, se, sigma, ok, empirical.trials)


def split_half_agreement(first: McEstimate, second: McEstimate, sigma: float = 3.0) -> bool:
    """Whether two independent halves estimate the same proportion."""
    if first.trials == 0 or second.trials == 0:
        return False
    pooled = (first.mean * first.trials + second.mean * second.trials) / (first.trials + second.trials)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / first.trials + 1.0 / second.trials))
    if se == 0.0:
        return first.mean == second.mean
    return abs(first.mean - second.mean) <= sigma * se


def _run_blocks(fn: Callable[[int, int], np.ndarray], sizes: Sequence[int], threads: int) -> np.ndarray:
    """Apply ``fn(block, size)`` to each block; rows come back in block order."""
    jobs = list(enumerate(sizes))
    if threads and threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda job: fn(*job), jobs))
    else:
        rows = [fn(*job) for job in jobs]
    return np.array(rows, dtype=np.int64)


def _sample_tree(gen: np.random.Generator, count: int, q_l: int, eps: float, e_m: float):
    lost = gen.random((count, q_l)) < eps
    flip = gen.random((count, q_l)) < e_m
    return lost, flip


def tree_measurement_counts(tree: TreeLike, epsilon0: float, e_m: float, basis: str, settings: McSettings) -> np.ndarray:
    """Per-block ``(trials, successes, errors)`` counts for the tree measurement."""
    tree = as_tree(tree)
    code = _basis_code(basis)
    q_l = tree_qubit_count(tree)
    tag = stream_tag(f"tree|{tree}|{epsilon0!r}|{e_m!r}|{basis.upper()}")

    def one_block(block: int, size: int):
        gen = block_generator(settings.seed, tag, block)
        lost, flip = _sample_tree(gen, size, q_l, epsilon0, e_m)
        ok, err = tree_measurement_kernel(lost, flip, tree.branches, code, settings.backend)
        return size, int(ok.sum()), int(err.sum())

    return _run_blocks(one_block, block_sizes(settings.trials), settings.threads)


def _basis_code(basis: str) -> int:
    tag = str(basis).upper()
    if tag == "Z":
        return BASIS_Z
    if tag == "X":
        return BASIS_X
    raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")


def mc_tree_measurement(
    tree: TreeLike, epsilon0: float, e_m: float, basis: str, settings: McSettings
) -> tuple[McEstimate, McEstimate]:
    """Sample the loss-tolerant measurement photon by photon.

    The encoded logical outcome is fixed to +1, so an error is a reported -1.

    Returns:
        ``(success, error_given_success)`` estimates.
    """
    counts = tree_measurement_counts(tree, epsilon0, e_m, basis, settings)
    trials, hits, errors = (int(v) for v in counts.sum(axis=0))
    b = basis.upper()
    return (
        McEstimate.from_counts(hits, trials, f"P_{b}"),
        McEstimate.from_counts(errors, hits, f"e_{b}"),
    )


@dataclass(frozen=True)
class RepeaterEstimates:
    p: McEstimate
    e_x: McEstimate
    e_y: McEstimate
    e_z: McEstimate


def _pauli_class(odd: np.ndarray, even: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Masks of X, Y and Z errors on the end pair from the two frame parities."""
    odd = odd.astype(bool)
    even = even.astype(bool)
    return odd & ~even, odd & even, ~odd & even


def _depolarized_photons(gen: np.random.Generator, size: int, photons: int, e_m: float):
    """Counts of second-leaf photons whose Pauli error flips only the odd frame
    parity, only the even one, or both (each with probability ``e_m / 2``)."""
    e_d = 1.5 * e_m
    probs = [e_d / 3.0] * 3 + [max(0.0, 1.0 - e_d)]
    counts = gen.multinomial(photons, probs, size=size)
    return counts[:, 0], counts[:, 1], counts[:, 2]


def _aggregate_block(gen, size, m, n, stats: TreeMetrics, p_b: float, e_m: float):
    z_meas, x_meas = 2 * (m - 1) * n, 2 * n
    node_fail = (1.0 - p_b) ** m
    ok = gen.binomial(n + 1, node_fail, size=size) == 0
    ok &= gen.binomial(z_meas, stats.fail_z, size=size) == 0
    ok &= gen.binomial(x_meas, stats.fail_x, size=size) == 0
    a_flips = gen.binomial(n, stats.e_x, size=size)
    b_flips = gen.binomial(n, stats.e_x, size=size)
    z_flips = gen.binomial(z_meas, stats.e_z, size=size)
    odd_only, even_only, both = _depolarized_photons(gen, size, 2 * (n + 1), e_m)
    odd = (a_flips + z_flips + odd_only + both) % 2
    even = (b_flips + z_flips + even_only + both) % 2
    return ok, odd, even


def _physical_block(gen, size, m, n, tree, eps: float, e_m: float, backend: str):
    z_meas, x_meas = 2 * (m - 1) * n, 2 * n
    q_l = tree_qubit_count(tree)
    # each Bell measurement needs both photons and the 1/2 linear-optics success
    arms = gen.random((size, n + 1, m, 3))
    bell = (arms[..., 0] >= eps) & (arms[..., 1] >= eps) & (arms[..., 2] < 0.5)
    ok = bell.any(axis=2).all(axis=1)

    def measure(count: int, basis: int):
        if count == 0:
            empty = np.zeros((size, 0), dtype=bool)
            return empty, empty
        lost, flip = _sample_tree(gen, size * count, q_l, eps, e_m)
        good, err = tree_measurement_kernel(lost, flip, tree.branches, basis, backend)
        return good.reshape(size, count), err.reshape(size, count)

    z_ok, z_err = measure(z_meas, BASIS_Z)
    x_ok, x_err = measure(x_meas, BASIS_X)
    ok &= z_ok.all(axis=1) & x_ok.all(axis=1)
    z_flips = z_err.sum(axis=1)
    # X-measured first-leaf pairs (a_i, b_i) sit at odd and even chain positions
    a_flips = x_err[:, 0::2].sum(axis=1)
    b_flips = x_err[:, 1::2].sum(axis=1)
    odd_only, even_only, both = _depolarized_photons(gen, size, 2 * (n + 1), e_m)
    odd = (a_flips + z_flips + odd_only + both) % 2
    even = (b_flips + z_flips + even_only + both) % 2
    return ok, odd, even


def repeater_trial_counts(
    config: ProtocolConfig,
    settings: McSettings,
    tree_stats: Optional[TreeMetrics] = None,
    physical: bool = False,
) -> np.ndarray:
    """Per-block ``(trials, successes, x_errors, y_errors, z_errors)`` counts."""
    metrics = evaluate(config, tree_stats)
    stats = metrics.tree
    m, n, e_m, eps = config.m, metrics.n, metrics.e_m, metrics.epsilon0
    p_b = bell_success(eps)
    if physical:
        if n > _PHYSICAL_MAX_NODES:
            raise ValueError(f"physical mode supports n <= {_PHYSICAL_MAX_NODES}, got n = {n}")
        per_trial = max(1, (2 * m * n) * tree_qubit_count(config.tree))
        block = max(1, min(BLOCK_SIZE, _PHYSICAL_CELLS // per_trial))
    else:
        block = BLOCK_SIZE
    label = "physical" if physical else "aggregate"
    tag = stream_tag(
        f"repeater|{label}|{m}|{config.tree}|{n}|{eps!r}|{e_m!r}|{stats.fail_z!r}|{stats.fail_x!r}|{stats.e_x!r}|{stats.e_z!r}"
    )

    def one_block(index: int, size: int):
        gen = block_generator(settings.seed, tag, index)
        if physical:
            ok, odd, even = _physical_block(gen, size, m, n, config.tree, eps, e_m, settings.backend)
        else:
            ok, odd, even = _aggregate_block(gen, size, m, n, stats, p_b, e_m)
        x_err, y_err, z_err = _pauli_class(odd, even)
        return size, int(ok.sum()), int((ok & x_err).sum()), int((ok & y_err).sum()), int((ok & z_err).sum())

    return _run_blocks(one_block, block_sizes(settings.trials, block), settings.threads)


def mc_repeater_trial(
    config: ProtocolConfig,
    settings: McSettings,
    tree_stats: Optional[TreeMetrics] = None,
    physical: bool = False,
) -> RepeaterEstimates:
    """Sample whole repeater-chain trials and the Pauli frame of the end pair.

    By default every tree measurement is a single event drawn from its
    analytic success and error probabilities (``tree_stats``, computed from
    ``config`` when omitted).  ``physical=True`` instead samples every tree
    photon and every Bell-measurement photon, which is only practical for
    short chains.

    Frame rules on the linear chain left after the Bell measurements: a
    wrong X outcome at an odd position acts as X on Alice's qubit, one at an
    even position as Z; a wrong Z outcome on an unused first-leaf arm flips
    both X-measured first-leaf outcomes of its node (Y); a depolarized
    second-leaf photon flips its own outcome, its partner's, or both.
    """
    counts = repeater_trial_counts(config, settings, tree_stats, physical)
    trials, hits, x_err, y_err, z_err = (int(v) for v in counts.sum(axis=0))
    return RepeaterEstimates(
        p=McEstimate.from_counts(hits, trials, "P"),
        e_x=McEstimate.from_counts(x_err, hits, "E_X"),
        e_y=McEstimate.from_counts(y_err, hits, "E_Y"),
        e_z=McEstimate.from_counts(z_err, hits, "E_Z"),
    )


def split_half(counts: np.ndarray, column: int, denominator: int = 0, tag: str = "") -> tuple[McEstimate, McEstimate]:
    """Estimates from the first and second half of the blocks of a count table."""
    half = max(1, len(counts) // 2)
    parts = counts[:half].sum(axis=0), counts[half:].sum(axis=0)
    return tuple(McEstimate.from_counts(int(p[column]), int(p[denominator]), tag) for p in parts)


def tree_comparisons(
    tree: TreeLike, epsilon0: float, e_m: float, settings: McSettings, bases: Sequence[str] = ("Z", "X")
) -> list[Comparison]:
    """Analytic ``P`` and ``e`` of each basis against their Monte Carlo estimates."""
    stats = tree_metrics(tree, epsilon0, e_m)
    out = []
    for basis in bases:
        success, error = mc_tree_measurement(tree, epsilon0, e_m, basis, settings)
        p, e = (stats.p_z, stats.e_z) if basis.upper() == "Z" else (stats.p_x, stats.e_x)
        out.append(compare(p, success, settings.confidence_sigma))
        if e is not None:
            out.append(compare(e, error, settings.confidence_sigma))
    return out


def repeater_comparisons(config: ProtocolConfig, settings: McSettings, physical: bool = False) -> list[Comparison]:
    """Analytic ``P`` and pair errors against one Monte Carlo run of the chain."""
    metrics = evaluate(config)
    est = mc_repeater_trial(config, settings, metrics.tree, physical)
    sigma = settings.confidence_sigma
    return [
        compare(metrics.p, est.p, sigma),
        compare(metrics.e_x, est.e_x, sigma),
        compare(metrics.e_y, est.e_y, sigma),
        compare(metrics.e_z, est.e_z, sigma),
    ]
