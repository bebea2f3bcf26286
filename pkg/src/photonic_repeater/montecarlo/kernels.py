"""Physical-qubit sampling of the loss-tolerant tree measurement.

The tree photons are stored level by level (breadth first): level ``j``
(``j = 0`` is the first level below the root) holds ``b_0 ... b_j`` photons
and photon ``i`` of level ``j`` owns children ``i * b_{j+1} + c`` of level
``j + 1``.  Each trial supplies one ``lost`` and one ``flip`` bit per photon.

A Z outcome on a photon is available when it is measured directly (not lost)
or inferred indirectly from its subtree; the indirect value wins when both
exist.  An indirect Z, and the root X, is a majority vote over branches: a
branch is a surviving child measured in X whose own children all yield Z.
With an even number of good branches the last one is ignored.

Two interchangeable implementations share one contract and return identical
bits: a per-trial numba loop and a level-vectorised numpy version.
"""
from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, njit

BASIS_Z = 0
BASIS_X = 1


def level_layout(branches) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(b, sizes, offsets)`` with ``b`` padded by a trailing 0 so ``b[j+1]``
    is always defined."""
    b = np.asarray(tuple(branches) + (0, 0), dtype=np.int64)
    sizes = np.cumprod(b[: len(branches)]).astype(np.int64)
    offsets = np.concatenate(([0], np.cumsum(sizes))).astype(np.int64)
    return b, sizes, offsets


@njit(cache=True, nogil=True)
def _vote(lost_t, flip_t, zok, zerr, child_start, nchild, grand_start, ngrand):
    count = 0
    ones = 0
    last = 0
    for c in range(nchild):
        ci = child_start + c
        if lost_t[ci]:
            continue
        ok = True
        par = 1 if flip_t[ci] else 0
        g0 = grand_start + c * ngrand
        for g in range(ngrand):
            if not zok[g0 + g]:
                ok = False
                break
            if zerr[g0 + g]:
                par ^= 1
        if ok:
            count += 1
            ones += par
            last = par
    if count == 0:
        return False, False
    if count % 2 == 0:
        ones -= last
        count -= 1
    return True, 2 * ones > count


@njit(cache=True, nogil=True)
def _tree_kernel_loop(lost, flip, b, sizes, offsets, basis):
    trials = lost.shape[0]
    nlev = sizes.shape[0]
    total = offsets[nlev]
    success = np.zeros(trials, dtype=np.bool_)
    error = np.zeros(trials, dtype=np.bool_)
    zok = np.zeros(total, dtype=np.bool_)
    zerr = np.zeros(total, dtype=np.bool_)
    for t in range(trials):
        lost_t = lost[t]
        flip_t = flip[t]
        for j in range(nlev - 1, -1, -1):
            nchild = b[j + 1]
            ngrand = b[j + 2]
            child_off = offsets[j + 1] if j + 1 < nlev else total
            grand_off = offsets[j + 2] if j + 2 < nlev else total
            for i in range(sizes[j]):
                q = offsets[j] + i
                ok, err = False, False
                if nchild > 0:
                    local = i * nchild
                    ok, err = _vote(lost_t, flip_t, zok, zerr, child_off + local, nchild, grand_off + local * ngrand, ngrand)
                if ok:
                    zok[q] = True
                    zerr[q] = err
                else:
                    zok[q] = not lost_t[q]
                    zerr[q] = flip_t[q]
        if basis == BASIS_Z:
            ok = True
            par = 0
            for q in range(sizes[0]):
                if not zok[q]:
                    ok = False
                    break
                if zerr[q]:
                    par ^= 1
            success[t] = ok
            error[t] = ok and par == 1
        else:
            grand_off = offsets[1] if nlev > 1 else total
            ok, err = _vote(lost_t, flip_t, zok, zerr, 0, b[0], grand_off, b[1])
            success[t] = ok
            error[t] = err
    return success, error


def _vote_numpy(child_lost, child_flip, grand_ok, grand_err):
    """Vectorised vote; child arrays have shape ``(T, N, nchild)`` and grand
    arrays ``(T, N, nchild, ngrand)``."""
    good = ~child_lost & grand_ok.all(axis=-1)
    parity = child_flip ^ (np.bitwise_xor.reduce(grand_err, axis=-1) if grand_err.shape[-1] else False)
    count = good.sum(axis=-1)
    ones = (good & parity).sum(axis=-1)
    nchild = good.shape[-1]
    # index of the last good branch (valid only when count > 0)
    last_idx = nchild - 1 - np.argmax(good[..., ::-1], axis=-1)
    last_par = np.take_along_axis(parity, last_idx[..., None], axis=-1)[..., 0]
    drop = (count > 0) & (count % 2 == 0)
    ones = ones - (drop & last_par)
    used = count - drop
    return count > 0, (count > 0) & (2 * ones > used)


def _tree_kernel_numpy(lost, flip, b, sizes, offsets, basis):
    trials = lost.shape[0]
    nlev = sizes.shape[0]
    zok: list = [None] * (nlev + 1)
    zerr: list = [None] * (nlev + 1)

    def grand(j):
        """Level ``j + 2`` Z results grouped by their level-``j+1`` parent."""
        if j + 2 < nlev:
            shape = (trials, int(sizes[j + 1]), int(b[j + 2]))
            return zok[j + 2].reshape(shape), zerr[j + 2].reshape(shape)
        n_parent = int(sizes[j + 1]) if j + 1 < nlev else 0
        return (np.ones((trials, n_parent, 0), dtype=bool), np.zeros((trials, n_parent, 0), dtype=bool))

    for j in range(nlev - 1, -1, -1):
        lost_j = lost[:, offsets[j] : offsets[j + 1]]
        flip_j = flip[:, offsets[j] : offsets[j + 1]]
        nchild = int(b[j + 1])
        if nchild == 0:
            zok[j], zerr[j] = ~lost_j, flip_j.copy()
            continue
        shape = (trials, int(sizes[j]), nchild)
        c_lost = lost[:, offsets[j + 1] : offsets[j + 2]].reshape(shape)
        c_flip = flip[:, offsets[j + 1] : offsets[j + 2]].reshape(shape)
        g_ok, g_err = grand(j)
        g_ok = g_ok.reshape(shape + (g_ok.shape[-1],))
        g_err = g_err.reshape(shape + (g_err.shape[-1],))
        ok, err = _vote_numpy(c_lost, c_flip, g_ok, g_err)
        zok[j] = ok | ~lost_j
        zerr[j] = np.where(ok, err, flip_j)

    if basis == BASIS_Z:
        success = zok[0].all(axis=1)
        error = success & np.bitwise_xor.reduce(zerr[0], axis=1)
        return success, error
    shape = (trials, 1, int(b[0]))
    c_lost = lost[:, : offsets[1]].reshape(shape)
    c_flip = flip[:, : offsets[1]].reshape(shape)
    if nlev > 1:
        g_ok = zok[1].reshape(shape + (int(b[1]),))
        g_err = zerr[1].reshape(shape + (int(b[1]),))
    else:
        g_ok = np.ones(shape + (0,), dtype=bool)
        g_err = np.zeros(shape + (0,), dtype=bool)
    ok, err = _vote_numpy(c_lost, c_flip, g_ok, g_err)
    return ok[:, 0], err[:, 0]


def tree_measurement_kernel(lost, flip, branches, basis: int, backend: str = "auto"):
    """Per-trial ``(success, error)`` bits of the loss-tolerant measurement.

    Args:
        lost: Boolean ``(trials, Q_L)`` photon-loss indicators.
        flip: Boolean ``(trials, Q_L)`` outcome-flip indicators.
        branches: Branching vector ``(b_0, ..., b_l)``.
        basis: ``BASIS_Z`` or ``BASIS_X`` for the logical measurement.
        backend: ``"numba"``, ``"numpy"`` or ``"auto"`` (numba when available).
    """
    if basis not in (BASIS_Z, BASIS_X):
        raise ValueError(f"unknown basis {basis}")
    b, sizes, offsets = level_layout(branches)
    lost = np.ascontiguousarray(lost, dtype=bool)
    flip = np.ascontiguousarray(flip, dtype=bool)
    if lost.shape != flip.shape or lost.ndim != 2 or lost.shape[1] != offsets[-1]:
        raise ValueError(f"expected arrays of shape (trials, {offsets[-1]}), got {lost.shape} and {flip.shape}")
    if backend == "auto":
        backend = "numba" if HAVE_NUMBA else "numpy"
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable or disabled")
        return _tree_kernel_loop(lost, flip, b, sizes, offsets, basis)
    if backend == "numpy":
        return _tree_kernel_numpy(lost, flip, b, sizes, offsets, basis)
    raise ValueError(f"unknown backend {backend!r}")
