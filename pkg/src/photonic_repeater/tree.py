"""Loss-tolerant measurement on tree-encoded qubits.

A qubit is encoded in a tree cluster state with branching vector
``(b_0, ..., b_l)``.  Level ``k`` (``k = 1 .. l+1``) holds ``b_0 * ... * b_{k-1}``
photons and every level-``k`` photon has ``b_k`` children (``b_{l+1} = 0``).

Every success probability here is carried internally as its *complement*
(failure probability) so that values like ``1 - P_Z ~ 1e-6`` keep full
relative precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class TreeParams:
    """Branching vector ``(b_0, ..., b_l)`` of the encoding tree."""

    branches: tuple[int, ...]

    def __post_init__(self):
        branches = tuple(int(b) for b in self.branches)
        if not branches:
            raise ValueError("tree needs at least one branching parameter")
        if any(b < 1 for b in branches):
            raise ValueError(f"branching parameters must be >= 1, got {branches}")
        object.__setattr__(self, "branches", branches)

    @property
    def depth(self) -> int:
        return len(self.branches) - 1

    def branch(self, k: int) -> int:
        """``b_k`` with ``b_k = 0`` beyond the last level."""
        return self.branches[k] if k < len(self.branches) else 0

    def __str__(self):
        return "{" + ",".join(map(str, self.branches)) + "}"


TreeLike = Union[TreeParams, Sequence[int]]


def as_tree(tree: TreeLike) -> TreeParams:
    return tree if isinstance(tree, TreeParams) else TreeParams(tuple(tree))


@dataclass(frozen=True)
class TreeMetrics:
    """Success and error statistics of the loss-tolerant Z/X measurements.

    ``fail_*`` fields are the complements ``1 - p_*`` evaluated without
    cancellation; prefer them when the success probability is close to 1.
    ``p_general`` is ``None`` for depth-0 trees, and an ``err_profile``
    entry is ``None`` where the matching indirect success probability is 0.
    """

    q_l: int
    r_profile: tuple[float, ...]
    p_general: Optional[float]
    p_z: float
    p_x: float
    err_profile: tuple[Optional[float], ...]
    e_z: float
    e_x: Optional[float]
    fail_z: float
    fail_x: float
    fail_general: Optional[float]


def tree_qubit_count(tree: TreeLike) -> int:
    """Number of photons in the tree, ``sum_j prod_{i<=j} b_i``."""
    tree = as_tree(tree)
    total, layer = 0, 1
    for b in tree.branches:
        layer *= b
        total += layer
    if total > _INT64_MAX:
        raise OverflowError(f"tree {tree} has {total} qubits, beyond the int64 range")
    return total


def _check_probability(name: str, value: float, upper: float = 1.0):
    if not (0.0 <= value <= upper):
        raise ValueError(f"{name} must lie in [0, {upper}], got {value}")


def failure_profile_array(eps, branches) -> list[np.ndarray]:
    """Vectorised ``1 - R_k`` for ``k = 0 .. l+1``.

    ``eps`` has shape ``(N,)`` and ``branches`` has shape ``(N, l+1)``; the
    result is a list of ``l + 2`` arrays of shape ``(N,)``.  Shared by the
    scalar API and the grid optimizer so both produce identical bits.
    """
    eps = np.asarray(eps, dtype=float)
    branches = np.asarray(branches)
    depth = branches.shape[1] - 1
    ones = np.ones_like(eps)
    fail = [ones] * (depth + 3)  # indices l+1, l+2 stay at R = 0
    with np.errstate(divide="ignore"):
        log_keep = np.log1p(-eps)
    lossless = eps == 0.0
    for k in range(depth, -1, -1):
        b_k = branches[:, k]
        b_next = branches[:, k + 1] if k + 1 <= depth else 0
        # 1 - S_k, S_k = (1 - eps) * (1 - eps * F_{k+2}) ** b_{k+1}
        with np.errstate(divide="ignore", invalid="ignore"):
            log_s = log_keep + b_next * np.log1p(-eps * fail[k + 2])
        one_minus_s = np.where(np.isneginf(log_s), 1.0, -np.expm1(log_s))
        fail_k = one_minus_s**b_k
        fail[k] = np.where(lossless, 0.0, np.where(eps >= 1.0, 1.0, fail_k))
    return fail[: depth + 2]


def _failure_profile(tree: TreeParams, eps: float) -> list[float]:
    arr = failure_profile_array(np.array([eps]), np.array([tree.branches]))
    return [float(a[0]) for a in arr]


def indirect_success_profile(tree: TreeLike, epsilon0: float) -> tuple[float, ...]:
    """Indirect Z-measurement success probabilities ``R_0 .. R_{l+1}``.

    The recursion is also applied at ``k = 0`` so that ``P_X = R_0``.
    """
    tree = as_tree(tree)
    _check_probability("epsilon0", epsilon0)
    return tuple(1.0 - f for f in _failure_profile(tree, epsilon0))


def loss_tolerant_success_general(tree: TreeLike, epsilon0: float) -> float:
    """Success probability ``P_L`` of a loss-tolerant measurement of an arbitrary
    observable in the X-Y plane."""
    tree = as_tree(tree)
    if tree.depth < 1:
        raise ValueError("P_L needs a tree of depth >= 1 (two or more branching levels)")
    _check_probability("epsilon0", epsilon0)
    fail = _failure_profile(tree, epsilon0)
    r1 = 1.0 - fail[1]
    first = (1.0 - epsilon0 * fail[1]) ** tree.branches[0] - (epsilon0 * r1) ** tree.branches[0]
    return first * (1.0 - epsilon0 * fail[2]) ** tree.branches[1]


def _fail_z(tree: TreeParams, eps: float, fail: Sequence[float]) -> float:
    if eps == 0.0:
        return 0.0
    if eps * fail[1] >= 1.0:
        return 1.0
    return -math.expm1(tree.branches[0] * math.log1p(-eps * fail[1]))


def loss_tolerant_success_z(tree: TreeLike, epsilon0: float) -> float:
    """``P_Z = (1 - eps + eps R_1) ** b_0``."""
    tree = as_tree(tree)
    _check_probability("epsilon0", epsilon0)
    return 1.0 - _fail_z(tree, epsilon0, _failure_profile(tree, epsilon0))


def loss_tolerant_success_x(tree: TreeLike, epsilon0: float) -> float:
    """``P_X = R_0``."""
    tree = as_tree(tree)
    _check_probability("epsilon0", epsilon0)
    return 1.0 - _failure_profile(tree, epsilon0)[0]


def measurement_error_from_depolarizing(e_d: float) -> float:
    """Pauli-measurement error ``2 e_d / 3`` caused by a depolarizing channel."""
    _check_probability("e_d", e_d, 0.75)
    return 2.0 * e_d / 3.0


def majority_vote_error(votes: int, p: float) -> float:
    """Error of a majority vote over ``votes`` independent guesses.

    With an even number of votes the last one is dropped.
    """
    if votes < 1:
        raise ValueError("majority vote needs at least one vote")
    used = votes if votes % 2 else votes - 1
    q = 1.0 - p
    return math.fsum(math.comb(used, j) * p**j * q ** (used - j) for j in range((used + 1) // 2, used + 1))


def _parity_error(first: float, count: int, p: float) -> float:
    """Error of the XOR of one outcome with error ``first`` and ``count`` outcomes
    with error ``p``: ``(1 - (1-2 first)(1-2 p)^count) / 2``."""
    if first >= 0.5 or p >= 0.5 and count:
        return 0.5
    log_bias = math.log1p(-2.0 * first) + count * math.log1p(-2.0 * p)
    return -math.expm1(log_bias) / 2.0


def _mixed_child_error(eps: float, fail_child: float, e_m: float, e_indirect: Optional[float]) -> float:
    """Average error of a direct-or-indirect Z outcome on a child that succeeded,
    with indirect outcomes preferred."""
    denom = 1.0 - eps * fail_child
    r_child = 1.0 - fail_child
    q = r_child / denom if denom > 0.0 else 0.0
    if q == 0.0:
        return e_m
    return (1.0 - q) * e_m + q * e_indirect


def indirect_error_profile(tree: TreeLike, epsilon0: float, e_m: float) -> tuple[Optional[float], ...]:
    """Average errors ``e_I_0 .. e_I_l`` of the indirect Z measurements.

    Each level combines branch parities by majority vote; an entry is ``None``
    where ``R_k = 0`` (no indirect measurement can succeed there).
    """
    tree = as_tree(tree)
    _check_probability("epsilon0", epsilon0)
    _check_probability("e_m", e_m, 0.5)
    return _error_profile(tree, epsilon0, e_m, _failure_profile(tree, epsilon0))


def _error_profile(tree: TreeParams, eps: float, e_m: float, fail: Sequence[float]):
    depth = tree.depth
    fail_ext = list(fail) + [1.0]  # R_{l+2} = 0
    errs: list[Optional[float]] = [0.0] * (depth + 3)
    for k in range(depth, -1, -1):
        b_k, b_next = tree.branch(k), tree.branch(k + 1)
        child = _mixed_child_error(eps, fail_ext[k + 2], e_m, errs[k + 2])
        e_branch = _parity_error(e_m, b_next, child)
        r_k = 1.0 - fail_ext[k]
        if r_k == 0.0:
            errs[k] = None
            continue
        s_k = (1.0 - eps) * (1.0 - eps * fail_ext[k + 2]) ** b_next
        acc = math.fsum(
            math.comb(b_k, mk) * s_k**mk * (1.0 - s_k) ** (b_k - mk) * majority_vote_error(mk, e_branch)
            for mk in range(1, b_k + 1)
        )
        # an average of votes that are each <= 1/2; the division can round past it
        errs[k] = min(acc / r_k, 0.5)
    return tuple(errs[: depth + 1])


def loss_tolerant_error_z(tree: TreeLike, epsilon0: float, e_m: float) -> float:
    """Average error ``e_Z`` of the loss-tolerant Z measurement."""
    tree = as_tree(tree)
    _check_probability("epsilon0", epsilon0)
    _check_probability("e_m", e_m, 0.5)
    fail = _failure_profile(tree, epsilon0)
    errs = _error_profile(tree, epsilon0, e_m, fail)
    return _error_z(tree, epsilon0, e_m, fail, errs)


def _error_z(tree, eps, e_m, fail, errs) -> float:
    e_level1 = errs[1] if tree.depth >= 1 else 0.0
    child = _mixed_child_error(eps, fail[1], e_m, e_level1)
    return _parity_error(0.0, tree.branches[0], child)


def loss_tolerant_error_x(tree: TreeLike, epsilon0: float, e_m: float) -> Optional[float]:
    """Average error ``e_X = e_I_0`` of the loss-tolerant X measurement."""
    return indirect_error_profile(tree, epsilon0, e_m)[0]


def tree_metrics(tree: TreeLike, epsilon0: float, e_m: float) -> TreeMetrics:
    """All tree statistics for one ``(tree, epsilon0, e_m)`` point."""
    tree = as_tree(tree)
    _check_probability("epsilon0", epsilon0)
    _check_probability("e_m", e_m, 0.5)
    fail = _failure_profile(tree, epsilon0)
    errs = _error_profile(tree, epsilon0, e_m, fail)
    fail_z = _fail_z(tree, epsilon0, fail)
    p_general = loss_tolerant_success_general(tree, epsilon0) if tree.depth >= 1 else None
    return TreeMetrics(
        q_l=tree_qubit_count(tree),
        r_profile=tuple(1.0 - f for f in fail),
        p_general=p_general,
        p_z=1.0 - fail_z,
        p_x=1.0 - fail[0],
        err_profile=errs,
        e_z=_error_z(tree, epsilon0, e_m, fail, errs),
        e_x=errs[0],
        fail_z=fail_z,
        fail_x=fail[0],
        fail_general=None if p_general is None else 1.0 - p_general,
    )
