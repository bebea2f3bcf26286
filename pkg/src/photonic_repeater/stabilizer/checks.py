"""Exhaustive checks of the graph-state rules the repeater protocol relies on.

Every random measurement outcome is enumerated by forcing each branch.
Whenever the state has at most ``statevector.MAX_QUBITS`` qubits the same
operation sequence is replayed on a dense state vector and the branch state
and probability must agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import networkx as nx
import numpy as np

from . import statevector as sv
from .tableau import Pauli, StabilizerTableau, graph_state, pauli_correction

Edges = list[tuple[int, int]]
_MAX_REPORTED_FAILURES = 20


@dataclass
class Verdict:
    name: str
    passed: bool = True
    cases: int = 0
    crosschecked: int = 0
    failures: list[str] = field(default_factory=list)
    corrections: dict = field(default_factory=dict)

    def fail(self, message: str):
        self.passed = False
        if len(self.failures) < _MAX_REPORTED_FAILURES:
            self.failures.append(message)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "crosschecked": self.crosschecked,
            "failures": list(self.failures),
            "corrections": self.corrections,
        }


# -- graphs -----------------------------------------------------------------
def path_edges(n: int) -> Edges:
    return [(i, i + 1) for i in range(n - 1)]


def star_edges(arms: int) -> Edges:
    """Vertex 0 joined to vertices ``1 .. arms``."""
    return [(0, i) for i in range(1, arms + 1)]


def star_like_edges(m: int) -> Edges:
    """Root 0; first leaves ``1 .. 2m`` on the root; second leaf ``2m + i`` on
    first leaf ``i``."""
    k = 2 * m
    return [(0, i) for i in range(1, k + 1)] + [(i, k + i) for i in range(1, k + 1)]


def complete_like_edges(m: int, offset: int = 0) -> Edges:
    """First leaves ``offset .. offset + 2m - 1`` fully connected, each with one
    second leaf ``offset + 2m + i``."""
    k = 2 * m
    first = [offset + i for i in range(k)]
    edges = list(itertools.combinations(first, 2))
    return edges + [(offset + i, offset + k + i) for i in range(k)]


def relabel(edges: Iterable[tuple[int, int]], mapping: dict) -> Edges:
    return [(mapping[a], mapping[b]) for a, b in edges if a in mapping and b in mapping]


def z_on(n: int, qubits: Iterable[int]) -> Pauli:
    return Pauli.product_of(n, {q: "Z" for q in qubits})


def neighbours(edges: Edges, v: int) -> list[int]:
    return sorted({b for a, b in edges if a == v} | {a for a, b in edges if b == v})


# -- operation replay -------------------------------------------------------
def _run_tableau(state: StabilizerTableau, ops) -> tuple[float, Optional[StabilizerTableau]]:
    prob = 1.0
    for op in ops:
        kind = op[0]
        if kind == "measure":
            _, p, state = state.measure(op[1], op[2])
            prob *= p
            if state is None:
                return 0.0, None
        elif kind == "pauli":
            state = state.apply_pauli(op[1])
        else:
            state = getattr(state, kind)(*op[1:])
    return prob, state


def _run_vector(psi: np.ndarray, ops) -> tuple[float, np.ndarray]:
    prob = 1.0
    for op in ops:
        kind = op[0]
        if kind == "measure":
            psi, p = sv.project(psi, op[1], op[2])
            prob *= p
            if p == 0.0:
                return 0.0, psi
        elif kind == "pauli":
            psi = sv.apply_pauli(psi, op[1])
        elif kind == "cz":
            psi = sv.apply_cz(psi, *op[1:])
        elif kind == "h":
            psi = sv.apply_h(psi, op[1])
        elif kind == "s":
            psi = sv.apply_phase(psi, op[1], 1)
        elif kind == "sdg":
            psi = sv.apply_phase(psi, op[1], 3)
        else:
            raise ValueError(f"unknown operation {kind!r}")
    return prob, psi


def run_branch(n: int, edges: Edges, ops, verdict: Optional[Verdict] = None, max_qubits: int = 16):
    """Apply ``ops`` to the graph state; cross-check on a state vector when small.

    Returns ``(probability, tableau or None)``.
    """
    prob, state = _run_tableau(graph_state(n, edges, max_qubits), ops)
    if state is not None and not state.is_valid():
        raise AssertionError("tableau invariant broken")
    if n <= sv.MAX_QUBITS:
        vprob, psi = _run_vector(sv.graph_state_vector(n, edges), ops)
        ok = abs(vprob - prob) < 1e-9
        if ok and state is not None:
            ok = sv.same_ray(psi, sv.tableau_to_vector(state))
        if verdict is not None:
            verdict.crosschecked += 1
            if not ok:
                verdict.fail(f"state-vector mismatch for graph {edges} ops {_describe(ops)}")
    return prob, state


def enumerate_branches(n: int, edges: Edges, prefix, observables: Sequence[Pauli], verdict: Optional[Verdict] = None, max_qubits: int = 16):
    """All outcome branches of measuring ``observables`` in order after ``prefix``.

    Shared prefixes are computed once.  Returns ``{outcomes: (probability,
    tableau or None)}``; small states are cross-checked on a state vector.
    """
    prob, state = _run_tableau(graph_state(n, edges, max_qubits), prefix)
    psi = None
    if n <= sv.MAX_QUBITS:
        _, psi = _run_vector(sv.graph_state_vector(n, edges), prefix)
    leaves = {}

    def walk(k, outcomes, p, t, v):
        if k == len(observables):
            leaves[outcomes] = (p, t)
            if v is not None and verdict is not None:
                verdict.crosschecked += 1
                ok = t is None or (t.is_valid() and sv.same_ray(v, sv.tableau_to_vector(t)))
                if not ok:
                    verdict.fail(f"state-vector mismatch for graph {edges} outcomes {outcomes}")
            return
        for o in (0, 1):
            if t is None:
                walk(k + 1, outcomes + (o,), 0.0, None, None)
                continue
            _, pt, child = t.measure(observables[k], o)
            vchild = None
            if v is not None:
                vchild, pv = sv.project(v, observables[k], o)
                if verdict is not None and abs(pv - pt) > 1e-9:
                    verdict.fail(f"branch probability mismatch for graph {edges} outcomes {outcomes + (o,)}")
            walk(k + 1, outcomes + (o,), p * pt, child, vchild)

    walk(0, (), prob, state, psi)
    return leaves


def _describe(ops) -> str:
    return "; ".join(f"{op[0]}{tuple(str(a) for a in op[1:])}" for op in ops)


def _measure_ops(n: int, qubits: Sequence[int], basis: str, outcomes: Sequence[int]):
    return [("measure", Pauli.single(n, q, basis), o) for q, o in zip(qubits, outcomes)]


# -- rule checks --------------------------------------------------------------
def check_rule_xx_contraction(chain_length: int) -> Verdict:
    """Two adjacent interior X measurements on a path contract it.

    Every adjacent interior pair and every outcome branch is checked; the
    remaining state must be the shortened path up to a Pauli correction,
    which is reported per branch.
    """
    if chain_length < 4:
        raise ValueError("the rule needs chain_length >= 4 (two adjacent interior qubits)")
    verdict = Verdict(f"xx_contraction[{chain_length}]")
    n = chain_length
    edges = path_edges(n)
    for i in range(1, n - 2):
        pair = (i, i + 1)
        kept = [q for q in range(n) if q not in pair]
        index = {q: k for k, q in enumerate(kept)}
        target = graph_state(len(kept), relabel(edges, index) + [(index[i - 1], index[i + 2])])
        for outcomes in itertools.product((0, 1), repeat=2):
            verdict.cases += 1
            prob, state = run_branch(n, edges, _measure_ops(n, pair, "X", outcomes), verdict)
            if state is None or abs(prob - 0.25) > 1e-12:
                verdict.fail(f"pair {pair} outcomes {outcomes}: probability {prob}")
                continue
            fix = pauli_correction(target, state.discard(pair))
            if fix is None:
                verdict.fail(f"pair {pair} outcomes {outcomes}: not a contracted path")
                continue
            verdict.corrections[f"pair={pair} outcomes={outcomes}"] = _pauli_on(fix, kept)
    return verdict


def _pauli_on(p: Pauli, labels: Sequence[int]) -> str:
    """Readable Pauli such as ``"X0 Z3"`` in original vertex labels."""
    parts = []
    for k, label in enumerate(labels):
        letter = {(0, 0): "", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[(int(p.x[k]), int(p.z[k]))]
        if letter:
            parts.append(f"{letter}{label}")
    return " ".join(parts) or "I"


def check_rule_z_removal(n: int, edges: Edges, v: int) -> Verdict:
    """Measuring Z on ``v`` deletes it; outcome 1 leaves ``Z_{N(v)}`` behind."""
    if not 0 <= v < n:
        raise ValueError(f"vertex {v} is not in a graph of {n} vertices")
    verdict = Verdict(f"z_removal[n={n}, v={v}]")
    kept = [q for q in range(n) if q != v]
    index = {q: k for k, q in enumerate(kept)}
    base = graph_state(len(kept), relabel(edges, index)) if kept else None
    nbrs = [index[q] for q in neighbours(edges, v)]
    for outcome in (0, 1):
        verdict.cases += 1
        prob, state = run_branch(n, edges, _measure_ops(n, [v], "Z", [outcome]), verdict)
        if state is None or abs(prob - 0.5) > 1e-12:
            verdict.fail(f"outcome {outcome}: probability {prob}")
            continue
        rest = state.discard([v])
        if base is None:
            ok = rest.n_qubits == 0
        else:
            expected = base.apply_pauli(z_on(len(kept), nbrs)) if outcome else base
            ok = rest.same_state(expected)
        if not ok:
            verdict.fail(f"outcome {outcome}: state is not the vertex-deleted graph")
    return verdict


def bell_measurement(n: int, u: int, w: int):
    """Linear-optics Bell measurement on ``(u, w)``: a Hadamard on ``w`` then a
    projection onto the Bell basis (``X_u X_w`` and ``Z_u Z_w``).

    Returns ``(prefix_ops, observables)``.
    """
    xx = Pauli.product_of(n, {u: "X", w: "X"})
    zz = Pauli.product_of(n, {u: "Z", w: "Z"})
    return [("h", w)], [xx, zz]


def cz_then_x(n: int, u: int, w: int):
    return [("cz", u, w)], [Pauli.single(n, u, "X"), Pauli.single(n, w, "X")]


def _pair_orbits(g: nx.Graph) -> list[tuple[int, int]]:
    """One ordered vertex pair per orbit of the automorphism group."""
    autos = list(nx.algorithms.isomorphism.GraphMatcher(g, g).isomorphisms_iter())
    reps = set()
    for u, w in itertools.permutations(sorted(g.nodes()), 2):
        reps.add(min((a[u], a[w]) for a in autos))
    return sorted(reps)


def bell_corpus(max_vertices: int = 6):
    """All graphs with 2 .. ``max_vertices`` vertices up to isomorphism, with one
    ordered vertex pair per automorphism orbit."""
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n < 2 or n > max_vertices:
            continue
        edges = [tuple(sorted(e)) for e in g.edges()]
        for u, w in _pair_orbits(g):
            yield n, edges, u, w


def check_bell_equivalence(max_vertices: int = 6) -> Verdict:
    """A successful Bell measurement acts as CZ followed by X on both qubits.

    For each input the four Bell outcomes must occur with the same
    probabilities as the matching CZ-then-X outcomes and leave the same
    state on the other qubits.  The Pauli correction of each branch relative
    to the all-zero branch is tabulated for the two-qubit-plus-environment
    path ``0-1-2-3`` measured on ``(1, 2)``.
    """
    verdict = Verdict(f"bell_equivalence[<= {max_vertices} vertices]")
    for n, edges, u, w in bell_corpus(max_vertices):
        bell = enumerate_branches(n, edges, *bell_measurement(n, u, w), verdict=verdict)
        cz = enumerate_branches(n, edges, *cz_then_x(n, u, w), verdict=verdict)
        reference = None
        for outcomes in itertools.product((0, 1), repeat=2):
            verdict.cases += 1
            (p_bell, s_bell), (p_cz, s_cz) = bell[outcomes], cz[outcomes]
            if abs(p_bell - p_cz) > 1e-12:
                verdict.fail(f"graph {edges} pair {(u, w)} outcomes {outcomes}: probability {p_bell} vs {p_cz}")
                continue
            if s_bell is None:
                continue
            rest_bell, rest_cz = s_bell.discard([u, w]), s_cz.discard([u, w])
            if not rest_bell.same_state(rest_cz):
                verdict.fail(f"graph {edges} pair {(u, w)} outcomes {outcomes}: states differ")
                continue
            if reference is None:
                reference = rest_cz
            if pauli_correction(reference, rest_bell) is None:
                verdict.fail(f"graph {edges} pair {(u, w)} outcomes {outcomes}: no Pauli correction")
    _bell_table(verdict)
    return verdict


def _bell_table(verdict: Verdict):
    n, edges, u, w = 4, path_edges(4), 1, 2
    branches = enumerate_branches(n, edges, *bell_measurement(n, u, w))
    reference = branches[(0, 0)][1].discard([u, w])
    for outcomes, (_, state) in sorted(branches.items()):
        fix = pauli_correction(reference, state.discard([u, w]))
        verdict.corrections[f"path 0-1-2-3, Bell on (1,2), outcomes={outcomes}"] = _pauli_on(fix, [0, 3])


# -- error propagation ----------------------------------------------------------
ERROR_SCENARIOS = ("Z_on_removed", "X_on_connector", "bipartite_equivalence", "repeater_frame")


def check_error_propagation(scenario: str) -> Verdict:
    """Check one of the Pauli-frame identities used by the error model.

    ``Z_on_removed``: a wrong Z outcome equals ``Z`` on the removed vertex's
    neighbours (stars with 1 to 6 arms, every vertex).
    ``X_on_connector``: on a chain measured in X everywhere but its ends, a
    wrong outcome at an odd position equals Z on the far end and at an even
    position Z on the near end (chains of 4 to 10 qubits).
    ``bipartite_equivalence``: on the two-qubit graph state ``Z_B = X_A`` and
    ``Z_A Z_B = Y_A`` up to phase.
    ``repeater_frame``: one repeater segment (Alice, one source node, Bob)
    with ``m = 1, 2``: every flipped outcome and every Pauli error before a
    Bell measurement maps to the X, Y or Z class on Alice's qubit used by the
    Monte Carlo frame.
    """
    if scenario == "Z_on_removed":
        return _z_on_removed()
    if scenario == "X_on_connector":
        return _x_on_connector()
    if scenario == "bipartite_equivalence":
        return _bipartite()
    if scenario == "repeater_frame":
        return _repeater_frame()
    raise ValueError(f"unknown scenario {scenario!r}; expected one of {ERROR_SCENARIOS}")


def _z_on_removed() -> Verdict:
    verdict = Verdict("error_propagation[Z_on_removed]")
    for arms in range(1, 7):
        n, edges = arms + 1, star_edges(arms)
        for v in range(n):
            sub = check_rule_z_removal(n, edges, v)
            verdict.cases += sub.cases
            verdict.crosschecked += sub.crosschecked
            for f in sub.failures:
                verdict.fail(f"star {arms} arms: {f}")
    return verdict


def _x_on_connector() -> Verdict:
    verdict = Verdict("error_propagation[X_on_connector]")
    for n in range(4, 11, 2):
        edges = path_edges(n)
        interior = list(range(1, n - 1))
        leaves = enumerate_branches(n, edges, [], [Pauli.single(n, q, "X") for q in interior], verdict)
        rest = {o: t.discard(interior) for o, (_, t) in leaves.items()}
        for outcomes, base in rest.items():
            for pos in interior:
                verdict.cases += 1
                flipped = list(outcomes)
                flipped[pos - 1] ^= 1
                # kept qubits are (A, B) = (0, 1) after discarding
                expected = base.apply_pauli(Pauli.single(2, 1 if pos % 2 else 0, "Z"))
                if not rest[tuple(flipped)].same_state(expected):
                    verdict.fail(f"chain {n} outcomes {outcomes}: flip at {pos} is not the predicted Z")
    verdict.corrections["odd position"] = "Z on the far end (B), equivalent to X on A"
    verdict.corrections["even position"] = "Z on the near end (A)"
    return verdict


def _bipartite() -> Verdict:
    verdict = Verdict("error_propagation[bipartite_equivalence]")
    edges = [(0, 1)]
    psi = sv.graph_state_vector(2, edges)
    pairs = {
        "Z_B ~ X_A": ("IZ", "XI"),
        "Z_A Z_B ~ Y_A": ("ZZ", "YI"),
    }
    state = graph_state(2, edges)
    for label, (lhs, rhs) in pairs.items():
        verdict.cases += 1
        verdict.crosschecked += 1
        a = sv.apply_pauli(psi, Pauli.from_string(lhs))
        b = sv.apply_pauli(psi, Pauli.from_string(rhs))
        if not sv.same_ray(a, b):
            verdict.fail(f"{label}: state vectors differ")
        if not state.apply_pauli(Pauli.from_string(lhs)).same_state(state.apply_pauli(Pauli.from_string(rhs))):
            verdict.fail(f"{label}: stabilizer groups differ")
        verdict.corrections[label] = "holds up to global phase"
    return verdict


def repeater_segment(m: int):
    """Qubit layout of Alice - source node - Bob.

    Returns ``(n, edges, roles)`` where ``roles`` maps names to qubits:
    ``A``, ``pA``, ``first`` (2m first leaves), ``second`` (2m second leaves),
    ``pB``, ``B``.  Arm 0 links to Alice and arm 1 to Bob.
    """
    k = 2 * m
    first = list(range(2, 2 + k))
    second = list(range(2 + k, 2 + 2 * k))
    p_b, b = 2 + 2 * k, 3 + 2 * k
    edges = [(0, 1)] + complete_like_edges(m, offset=2) + [(p_b, b)]
    roles = {"A": 0, "pA": 1, "first": first, "second": second, "pB": p_b, "B": b}
    return b + 1, edges, roles


def _segment_branches(n, edges, roles, z_outcomes, verdict, error: Optional[tuple[int, str]] = None):
    """Reduced (Alice, Bob) state for every outcome pattern of the six chain
    X measurements, with the unused-arm Z outcomes fixed to ``z_outcomes``."""
    first, second = roles["first"], roles["second"]
    prefix = []
    if error is not None:
        prefix.append(("pauli", Pauli.single(n, error[0], error[1])))
    # unused arms are removed by Z measurements on both leaves
    unused = first[2:] + second[2:]
    prefix += _measure_ops(n, unused, "Z", z_outcomes)
    chain = [roles["pA"], second[0], first[0], first[1], second[1], roles["pB"]]
    prefix += [("cz", roles["pA"], second[0]), ("cz", second[1], roles["pB"])]
    leaves = enumerate_branches(n, edges, prefix, [Pauli.single(n, q, "X") for q in chain], verdict)
    measured = unused + chain
    return {o: t.discard(measured) for o, (_, t) in leaves.items()}, chain


_CLASS = {"X": Pauli.from_string("XI"), "Y": Pauli.from_string("YI"), "Z": Pauli.from_string("ZI"), "I": Pauli.from_string("II")}


def _same_up_to(verdict, actual, base, cls, label):
    for outcomes, state in base.items():
        verdict.cases += 1
        if not actual[outcomes].same_state(state.apply_pauli(_CLASS[cls])):
            verdict.fail(f"{label}, outcomes {outcomes}: expected class {cls}")
            return


def _repeater_frame() -> Verdict:
    verdict = Verdict("error_propagation[repeater_frame]")
    expect = {}
    for m in (1, 2):
        n, edges, roles = repeater_segment(m)
        n_z = 2 * (2 * m - 2)
        z_base = [0] * n_z
        base, chain = _segment_branches(n, edges, roles, z_base, verdict)
        # a flipped X outcome along the chain is another branch of the same run
        for pos in range(1, len(chain) + 1):
            cls = "X" if pos % 2 else "Z"
            for outcomes, state in base.items():
                verdict.cases += 1
                flipped = list(outcomes)
                flipped[pos - 1] ^= 1
                if not base[tuple(flipped)].same_state(state.apply_pauli(_CLASS[cls])):
                    verdict.fail(f"m={m} flip X at position {pos}, outcomes {outcomes}: expected class {cls}")
            expect[f"flip X outcome at chain position {pos}"] = cls
        # flipped Z outcomes on unused arms (first leaves come first)
        for k in range(n_z):
            z_flip = list(z_base)
            z_flip[k] ^= 1
            cls = "Y" if k < n_z // 2 else "I"
            flipped, _ = _segment_branches(n, edges, roles, z_flip, verdict)
            _same_up_to(verdict, flipped, base, cls, f"m={m} flip Z outcome {k}")
            expect[f"flip Z outcome on an unused {'first' if k < n_z // 2 else 'second'} leaf"] = cls
        # Pauli errors on second-leaf photons before their Bell measurement
        for name, q in (("pA", roles["pA"]), ("q", roles["second"][0]), ("q'", roles["second"][1]), ("pB", roles["pB"])):
            pos = chain.index(q) + 1
            own, partner = ("X", "Z") if pos % 2 else ("Z", "X")
            for letter in "XYZ":
                cls = {"Z": own, "X": partner, "Y": "Y"}[letter]
                noisy, _ = _segment_branches(n, edges, roles, z_base, verdict, (q, letter))
                _same_up_to(verdict, noisy, base, cls, f"m={m} {letter} on {name}")
                expect[f"{letter} error on second-leaf photon at {'odd' if pos % 2 else 'even'} position"] = cls
    verdict.corrections = dict(sorted(expect.items()))
    return verdict


# -- star to complete -------------------------------------------------------
def check_star_to_complete(m: int) -> Verdict:
    """A Y measurement on the root of the star-like state leaves the
    complete-like state up to a local Clifford correction.

    The correction (S or S-dagger on each first leaf, then a Pauli) is found
    by search and reported per outcome.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    verdict = Verdict(f"star_to_complete[m={m}]")
    k = 2 * m
    n = 2 * k + 1
    edges = star_like_edges(m)
    target = graph_state(2 * k, complete_like_edges(m))
    for outcome in (0, 1):
        verdict.cases += 1
        prob, state = run_branch(n, edges, _measure_ops(n, [0], "Y", [outcome]), verdict)
        if state is None or abs(prob - 0.5) > 1e-12:
            verdict.fail(f"outcome {outcome}: probability {prob}")
            continue
        rest = state.discard([0])
        found = _search_local_clifford(rest, target, list(range(k)))
        if found is None:
            verdict.fail(f"outcome {outcome}: no local Clifford correction found")
            continue
        phases, fix = found
        labels = list(range(1, n))
        gates = " ".join(f"{g}{q + 1}" for q, g in zip(range(k), phases))
        verdict.corrections[f"outcome={outcome}"] = f"{gates}; then {_pauli_on(fix, labels)}"
        if n <= sv.MAX_QUBITS:
            ops = _measure_ops(n, [0], "Y", [outcome])
            ops += [("s" if g == "S" else "sdg", q + 1) for q, g in zip(range(k), phases)]
            ops += [("pauli", _lift(fix, n, labels))]
            _, psi = _run_vector(sv.graph_state_vector(n, edges), ops)
            expected = _embed_root(graph_state(2 * k, complete_like_edges(m)), outcome)
            verdict.crosschecked += 1
            if not sv.same_ray(psi, sv.tableau_to_vector(expected)):
                verdict.fail(f"outcome {outcome}: state-vector check of the correction failed")
    return verdict


def _search_local_clifford(state: StabilizerTableau, target: StabilizerTableau, qubits: Sequence[int]):
    for choice in itertools.product(("S", "Sdg"), repeat=len(qubits)):
        trial = state
        for q, g in zip(qubits, choice):
            trial = trial.s(q) if g == "S" else trial.sdg(q)
        fix = pauli_correction(trial, target)
        if fix is not None:
            return choice, fix
    return None


def _lift(p: Pauli, n: int, labels: Sequence[int]) -> Pauli:
    letters = {}
    for k, label in enumerate(labels):
        letter = {(0, 0): None, (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[(int(p.x[k]), int(p.z[k]))]
        if letter:
            letters[label] = letter
    return Pauli.product_of(n, letters)


def _embed_root(rest: StabilizerTableau, outcome: int) -> StabilizerTableau:
    """Prepend qubit 0 in the Y eigenstate ``(-1)**outcome``."""
    n = rest.n_qubits + 1
    gens = [Pauli(np.concatenate([[0], g.x]).astype(np.uint8), np.concatenate([[0], g.z]).astype(np.uint8), g.r) for g in rest.generators]
    root = Pauli.single(n, 0, "Y")
    gens.insert(0, Pauli(root.x, root.z, (root.r + 2 * outcome) % 4))
    return StabilizerTableau(gens, rest.max_qubits)


# -- corpus -------------------------------------------------------------------
def run_all(quick: bool = False) -> list[Verdict]:
    """Every check over the shipped corpus."""
    verdicts = [check_rule_xx_contraction(length) for length in range(4, 9)]
    for arms in range(1, 7):
        verdicts.append(check_rule_z_removal(arms + 1, star_edges(arms), 0))
    for length in range(3, 9):
        verdicts.append(check_rule_z_removal(length, path_edges(length), length // 2))
    verdicts.append(check_rule_z_removal(1, [], 0))
    verdicts.append(check_bell_equivalence(4 if quick else 6))
    verdicts += [check_error_propagation(s) for s in ERROR_SCENARIOS]
    verdicts += [check_star_to_complete(m) for m in (1, 2, 3)]
    return verdicts
