"""Dense state-vector reference for small stabilizer computations.

Qubit ``q`` is bit ``q`` of the basis-state index.  Used only to cross-check
the tableau engine, so it favours clarity over speed.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .tableau import Pauli, StabilizerTableau

MAX_QUBITS = 10


def _check_size(n: int):
    if n > MAX_QUBITS:
        raise ValueError(f"state-vector reference is capped at {MAX_QUBITS} qubits, got {n}")


def _indices(n: int) -> np.ndarray:
    return np.arange(2**n, dtype=np.int64)


def _bit(idx: np.ndarray, q: int) -> np.ndarray:
    return (idx >> q) & 1


def graph_state_vector(n: int, edges: Iterable[tuple[int, int]]) -> np.ndarray:
    _check_size(n)
    idx = _indices(n)
    phase = np.zeros(idx.shape, np.int64)
    for a, b in edges:
        phase ^= _bit(idx, a) & _bit(idx, b)
    return (1.0 - 2.0 * phase).astype(complex) / np.sqrt(2.0**n)


def apply_pauli(psi: np.ndarray, p: Pauli) -> np.ndarray:
    """``i**r X**x Z**z |psi>``."""
    n = p.n
    idx = _indices(n)
    xmask = sum(1 << q for q in range(n) if p.x[q])
    parity = np.zeros(idx.shape, np.int64)
    for q in range(n):
        if p.z[q]:
            parity ^= _bit(idx, q)
    out = psi * (1.0 - 2.0 * parity)
    flipped = np.empty_like(out)
    flipped[idx ^ xmask] = out
    return (1j ** (p.r % 4)) * flipped


def project(psi: np.ndarray, p: Pauli, outcome: int) -> tuple[np.ndarray, float]:
    """Project onto the ``(-1)**outcome`` eigenspace; returns the normalised
    state (zeros if impossible) and the branch probability."""
    sign = 1.0 - 2.0 * outcome
    proj = 0.5 * (psi + sign * apply_pauli(psi, p))
    prob = float(np.vdot(proj, proj).real)
    if prob < 1e-12:
        return np.zeros_like(psi), 0.0
    return proj / np.sqrt(prob), prob


def apply_cz(psi: np.ndarray, a: int, b: int) -> np.ndarray:
    idx = _indices(int(np.log2(psi.size)))
    return psi * (1.0 - 2.0 * (_bit(idx, a) & _bit(idx, b)))


def apply_h(psi: np.ndarray, q: int) -> np.ndarray:
    n = int(np.log2(psi.size))
    t = psi.reshape([2] * n)
    axis = n - 1 - q
    t = np.moveaxis(t, axis, 0)
    t = np.stack([(t[0] + t[1]) / np.sqrt(2.0), (t[0] - t[1]) / np.sqrt(2.0)])
    return np.moveaxis(t, 0, axis).reshape(-1)


def apply_phase(psi: np.ndarray, q: int, power: int = 1) -> np.ndarray:
    """``S**power`` on qubit ``q``."""
    idx = _indices(int(np.log2(psi.size)))
    return psi * np.where(_bit(idx, q) == 1, 1j**power, 1.0)


def tableau_to_vector(t: StabilizerTableau, seed: int = 0) -> np.ndarray:
    """Normalised vector of the stabilizer state (global phase arbitrary)."""
    n = t.n_qubits
    _check_size(n)
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    for g in t.generators:
        psi = 0.5 * (psi + apply_pauli(psi, g))
    norm = np.linalg.norm(psi)
    if norm < 1e-9:
        raise ValueError("projection vanished; generators are inconsistent")
    return psi / norm


def same_ray(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """Equal up to a global phase."""
    return abs(abs(np.vdot(a, b)) - 1.0) < tol
