"""Stabilizer tableaus over the binary symplectic representation.

A Pauli operator is stored as ``i**r * prod_q X_q**x_q Z_q**z_q`` (X before Z
on each qubit).  Tableaus hold ``n`` such generators for ``n`` qubits and
follow value semantics: every operation returns a new object.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

DEFAULT_MAX_QUBITS = 16

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}


class QubitCapError(ValueError):
    """Raised when a tableau would exceed the configured qubit cap."""


@dataclass(frozen=True, eq=False)
class Pauli:
    x: np.ndarray
    z: np.ndarray
    r: int = 0

    @classmethod
    def identity(cls, n: int) -> "Pauli":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8), 0)

    @classmethod
    def from_string(cls, text: str) -> "Pauli":
        """Parse ``"+XIZY"``/``"-iZZ"``-style strings (qubit 0 first)."""
        sign, body = 0, text
        for prefix, value in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2), ("i", 1)):
            if text.startswith(prefix):
                sign, body = value, text[len(prefix):]
                break
        x = np.array([_LETTER_BITS[c][0] for c in body], np.uint8)
        z = np.array([_LETTER_BITS[c][1] for c in body], np.uint8)
        # each Y = i X Z contributes one factor of i
        return cls(x, z, (sign + int((x & z).sum())) % 4)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "Pauli":
        chars = ["I"] * n
        chars[qubit] = letter
        return cls.from_string("".join(chars))

    @classmethod
    def product_of(cls, n: int, letters: dict) -> "Pauli":
        chars = ["I"] * n
        for q, letter in letters.items():
            chars[q] = letter
        return cls.from_string("".join(chars))

    @property
    def n(self) -> int:
        return len(self.x)

    def __mul__(self, other: "Pauli") -> "Pauli":
        r = (self.r + other.r + 2 * int((self.z & other.x).sum())) % 4
        return Pauli(self.x ^ other.x, self.z ^ other.z, r)

    def commutes_with(self, other: "Pauli") -> bool:
        return symplectic(self, other) == 0

    def is_hermitian(self) -> bool:
        return (self.r - int((self.x & self.z).sum())) % 2 == 0

    def key(self) -> tuple:
        return (self.x.tobytes(), self.z.tobytes(), self.r % 4)

    def __eq__(self, other) -> bool:
        return isinstance(other, Pauli) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self) -> str:
        ys = int((self.x & self.z).sum())
        sign = (self.r - ys) % 4
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[sign]
        letters = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        return prefix + "".join(letters[(int(a), int(b))] for a, b in zip(self.x, self.z))

    __repr__ = __str__


def symplectic(a: Pauli, b: Pauli) -> int:
    return int(((a.x & b.z) ^ (a.z & b.x)).sum() % 2)


def solve_gf2(rows: np.ndarray, target: np.ndarray) -> Optional[np.ndarray]:
    """Coefficients ``c`` with ``c @ rows = target`` over GF(2), or ``None``."""
    k = rows.shape[0]
    aug = np.concatenate([rows.T.copy(), target.reshape(-1, 1)], axis=1).astype(np.uint8) % 2
    pivots = []
    row = 0
    for col in range(k):
        hit = np.nonzero(aug[row:, col])[0]
        if hit.size == 0:
            continue
        p = row + hit[0]
        aug[[row, p]] = aug[[p, row]]
        for other in np.nonzero(aug[:, col])[0]:
            if other != row:
                aug[other] ^= aug[row]
        pivots.append(col)
        row += 1
        if row == aug.shape[0]:
            break
    if aug[row:, -1].any():
        return None
    coeffs = np.zeros(k, np.uint8)
    for i, col in enumerate(pivots):
        coeffs[col] = aug[i, -1]
    return coeffs


class StabilizerTableau:
    """Pure stabilizer state given by ``n`` commuting, independent generators.

    Generator ``i`` is ``i**R[i] X**X[i] Z**Z[i]``; rows are stored as arrays
    so gates and row products act on all generators at once.
    """

    def __init__(self, generators: Sequence[Pauli], max_qubits: int = DEFAULT_MAX_QUBITS):
        gens = list(generators)
        n = gens[0].n if gens else 0
        if len(gens) != n or any(g.n != n for g in gens):
            raise ValueError("a stabilizer state needs exactly n generators on n qubits")
        x = np.array([g.x for g in gens], np.uint8).reshape(n, n)
        z = np.array([g.z for g in gens], np.uint8).reshape(n, n)
        r = np.array([g.r % 4 for g in gens], np.int64)
        self._set(x, z, r, max_qubits)

    @classmethod
    def _from_arrays(cls, x, z, r, max_qubits) -> "StabilizerTableau":
        obj = cls.__new__(cls)
        obj._set(x, z, r, max_qubits)
        return obj

    def _set(self, x, z, r, max_qubits):
        n = x.shape[0]
        if n > max_qubits:
            raise QubitCapError(f"{n} qubits exceed the cap of {max_qubits}")
        self._x, self._z, self._r = x, z, r % 4
        self.max_qubits = max_qubits

    @property
    def n_qubits(self) -> int:
        return self._x.shape[0]

    @property
    def generators(self) -> tuple[Pauli, ...]:
        return tuple(Pauli(self._x[i].copy(), self._z[i].copy(), int(self._r[i])) for i in range(self.n_qubits))

    def _copy(self):
        return self._x.copy(), self._z.copy(), self._r.copy()

    def _with(self, x, z, r) -> "StabilizerTableau":
        return StabilizerTableau._from_arrays(x, z, r, self.max_qubits)

    # -- invariants -------------------------------------------------------
    def bit_matrix(self) -> np.ndarray:
        return np.concatenate([self._x, self._z], axis=1)

    def _symplectic_with(self, p: Pauli) -> np.ndarray:
        return ((self._x.astype(np.int64) @ p.z + self._z.astype(np.int64) @ p.x) % 2).astype(np.uint8)

    def is_valid(self) -> bool:
        """Generators are Hermitian, pairwise commuting and independent."""
        x, z = self._x.astype(np.int64), self._z.astype(np.int64)
        if ((self._r - (x & z).sum(axis=1)) % 2).any():
            return False
        if ((x @ z.T + z @ x.T) % 2).any():
            return False
        return _rank_gf2(self.bit_matrix()) == self.n_qubits

    # -- gates (conjugation by Cliffords) ---------------------------------
    def h(self, q: int) -> "StabilizerTableau":
        x, z, r = self._copy()
        r += 2 * (x[:, q] & z[:, q])
        x[:, q], z[:, q] = self._z[:, q], self._x[:, q]
        return self._with(x, z, r)

    def s(self, q: int) -> "StabilizerTableau":
        return self._phase(q, 1)

    def sdg(self, q: int) -> "StabilizerTableau":
        return self._phase(q, 3)

    def _phase(self, q: int, power: int) -> "StabilizerTableau":
        x, z, r = self._copy()
        r += power * x[:, q]
        z[:, q] ^= x[:, q]
        return self._with(x, z, r)

    def cz(self, a: int, b: int) -> "StabilizerTableau":
        if a == b:
            raise ValueError("CZ needs two distinct qubits")
        x, z, r = self._copy()
        r += 2 * (x[:, a] & x[:, b])
        z[:, a] ^= x[:, b]
        z[:, b] ^= x[:, a]
        return self._with(x, z, r)

    def apply_pauli(self, p: Pauli) -> "StabilizerTableau":
        """State ``P |psi>``: generators anticommuting with ``P`` change sign."""
        x, z, r = self._copy()
        return self._with(x, z, r + 2 * self._symplectic_with(p))

    # -- group membership -------------------------------------------------
    def sign_of(self, p: Pauli) -> Optional[int]:
        """``+1``/``-1`` if ``+P``/``-P`` stabilizes the state, else ``None``."""
        if self._symplectic_with(p).any():
            return None
        x, z, r, pivots = self._echelon()
        n = self.n_qubits
        acc = Pauli(p.x.copy(), p.z.copy(), p.r)
        for i, c in enumerate(pivots):
            if (acc.x[c] if c < n else acc.z[c - n]):
                acc = acc * Pauli(x[i], z[i], int(r[i]))
        if acc.x.any() or acc.z.any():
            return None
        if acc.r % 4 == 0:
            return 1
        if acc.r % 4 == 2:
            return -1
        return None

    def _echelon(self):
        cached = getattr(self, "_echelon_cache", None)
        if cached is None:
            cached = self._reduced(with_pivots=True)
            self._echelon_cache = cached
        return cached

    def measure(self, p: Pauli, forced: Optional[int] = None) -> tuple[int, float, Optional["StabilizerTableau"]]:
        """Measure the Hermitian Pauli ``p``.

        Args:
            p: Observable; eigenvalue ``(-1)**outcome``.
            forced: Outcome to project on.  Random outcomes default to 0.

        Returns:
            ``(outcome, probability, state)``; ``state`` is ``None`` when the
            forced outcome has probability zero.
        """
        if not p.is_hermitian():
            raise ValueError(f"{p} is not Hermitian")
        anti = np.nonzero(self._symplectic_with(p))[0]
        if anti.size == 0:
            outcome = 0 if self.sign_of(p) == 1 else 1
            if forced is not None and forced != outcome:
                return int(forced), 0.0, None
            return outcome, 1.0, self
        outcome = 0 if forced is None else int(forced)
        x, z, r = self._copy()
        pivot, others = anti[0], anti[1:]
        _row_multiply(x, z, r, others, pivot)
        x[pivot], z[pivot], r[pivot] = p.x, p.z, p.r + 2 * outcome
        return outcome, 0.5, self._with(x, z, r)

    # -- canonical form ---------------------------------------------------
    def _reduced(self, column_order: Optional[Sequence[int]] = None, with_pivots: bool = False):
        n = self.n_qubits
        x, z, r = self._copy()
        cols = list(column_order) if column_order is not None else list(range(2 * n))
        top = 0
        pivots = []
        for c in cols:
            column = x[:, c] if c < n else z[:, c - n]
            hits = np.nonzero(column[top:])[0]
            if hits.size == 0:
                continue
            hit = top + hits[0]
            if hit != top:
                for arr in (x, z, r):
                    arr[[top, hit]] = arr[[hit, top]]
                column = x[:, c] if c < n else z[:, c - n]
            rows = np.nonzero(column)[0]
            _row_multiply(x, z, r, rows[rows != top], top)
            pivots.append(c)
            top += 1
            if top == n:
                break
        if with_pivots:
            return x, z, r % 4, pivots
        return x, z, r % 4

    def canonical(self, column_order: Optional[Sequence[int]] = None) -> tuple[Pauli, ...]:
        """Reduced row echelon generators (unique for the stabilizer group)."""
        x, z, r = self._reduced(column_order)
        return tuple(Pauli(x[i], z[i], int(r[i])) for i in range(self.n_qubits))

    def same_state(self, other: "StabilizerTableau") -> bool:
        if self.n_qubits != other.n_qubits:
            return False
        a, b = self._reduced(), other._reduced()
        return all(np.array_equal(u, v) for u, v in zip(a, b))

    def discard(self, qubits: Iterable[int]) -> "StabilizerTableau":
        """Trace out qubits that are in a product state with the rest."""
        drop = sorted(set(qubits))
        n = self.n_qubits
        keep = [q for q in range(n) if q not in drop]
        order = drop + [q + n for q in drop] + keep + [q + n for q in keep]
        x, z, r = self._reduced(order)
        free = ~(x[:, drop].any(axis=1) | z[:, drop].any(axis=1)) if drop else np.ones(n, bool)
        if int(free.sum()) != len(keep):
            raise ValueError(f"qubits {drop} are entangled with the rest and cannot be discarded")
        idx = np.array(keep, dtype=int)
        rows = np.nonzero(free)[0]
        return self._with(x[np.ix_(rows, idx)].copy(), z[np.ix_(rows, idx)].copy(), r[rows].copy())

    def __repr__(self):
        return "StabilizerTableau([" + ", ".join(map(str, self.generators)) + "])"


def _row_multiply(x, z, r, targets, source):
    """Replace each row in ``targets`` by ``row * row[source]`` in place."""
    if len(targets) == 0:
        return
    phase = (z[targets].astype(np.int64) @ x[source].astype(np.int64)) % 2
    r[targets] = (r[targets] + r[source] + 2 * phase) % 4
    x[targets] ^= x[source]
    z[targets] ^= z[source]


def _rank_gf2(m: np.ndarray) -> int:
    m = m.copy() % 2
    rank = 0
    for c in range(m.shape[1] if m.size else 0):
        hit = np.nonzero(m[rank:, c])[0]
        if hit.size == 0:
            continue
        p = rank + hit[0]
        m[[rank, p]] = m[[p, rank]]
        for other in np.nonzero(m[:, c])[0]:
            if other != rank:
                m[other] ^= m[rank]
        rank += 1
        if rank == m.shape[0]:
            break
    return rank


def pauli_correction(source: StabilizerTableau, target: StabilizerTableau) -> Optional[Pauli]:
    """A Pauli ``C`` with ``C |source> = |target>`` up to phase, or ``None``
    when the two states differ by more than signs."""
    n = source.n_qubits
    if target.n_qubits != n:
        return None
    signs = []
    rows = []
    for g in target.generators:
        s = source.sign_of(g)
        if s is None:
            return None
        signs.append(0 if s == 1 else 1)
        rows.append(np.concatenate([g.z, g.x]))  # <C, g> = C_x . g_z + C_z . g_x
    if n == 0:
        return Pauli.identity(0)
    sol = solve_gf2(np.array(rows, np.uint8).T, np.array(signs, np.uint8))
    if sol is None:
        return None
    c = Pauli(sol[:n].astype(np.uint8), sol[n:].astype(np.uint8), 0)
    return Pauli(c.x, c.z, int((c.x & c.z).sum()) % 4)


def graph_state(n: int, edges: Iterable[tuple[int, int]], max_qubits: int = DEFAULT_MAX_QUBITS) -> StabilizerTableau:
    """Graph state with generators ``X_v Z_{N(v)}``, all signs ``+``."""
    if n > max_qubits:
        raise QubitCapError(f"{n} qubits exceed the cap of {max_qubits}")
    adj = np.zeros((n, n), np.uint8)
    for a, b in edges:
        if a == b:
            raise ValueError("graph states have no self-loops")
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"edge ({a}, {b}) references a missing vertex")
        adj[a, b] = adj[b, a] = 1
    gens = []
    for v in range(n):
        x = np.zeros(n, np.uint8)
        x[v] = 1
        gens.append(Pauli(x, adj[v].copy(), 0))
    return StabilizerTableau(gens, max_qubits)


def basis_pauli(n: int, qubit: int, basis: str) -> Pauli:
    basis = basis.upper()
    if basis not in ("X", "Y", "Z"):
        raise ValueError(f"basis must be X, Y or Z, got {basis!r}")
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    return Pauli.single(n, qubit, basis)


def measure_pauli(t: StabilizerTableau, qubit: int, basis: str, forced_outcome: Optional[int] = None):
    """Single-qubit Pauli measurement; see :meth:`StabilizerTableau.measure`."""
    return t.measure(basis_pauli(t.n_qubits, qubit, basis), forced_outcome)
