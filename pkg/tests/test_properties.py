"""Property-based checks of the model invariants."""
import math
import warnings
from math import comb, fsum

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from photonic_repeater.montecarlo import McSettings, tree_measurement_counts
from photonic_repeater.optimize import Constraints, SearchSpace, optimize
from photonic_repeater.prep import (
    SourceDetectorParams,
    complete_state_photon_bound,
    fusion_success_bounds,
    ghz_source_stats,
    prep_estimate,
    star_state_photon_bound,
)
from photonic_repeater.repeater import HardwareParams, LinkParams, StageError, evaluate, final_pair_errors, make_config
from photonic_repeater.stabilizer import Pauli, graph_state
from photonic_repeater.stabilizer import statevector as sv
from photonic_repeater.tree import tree_metrics

trees = st.lists(st.integers(1, 7), min_size=2, max_size=4).map(tuple)
losses = st.floats(0.0, 1.0)
meas_errors = st.floats(0.0, 0.5)
probabilities = st.floats(0.0, 1.0)


def in_unit(x):
    return 0.0 <= x <= 1.0


# -- tree ------------------------------------------------------------------------
@given(trees, losses, meas_errors)
def test_tree_values_are_probabilities(branches, eps, e_m):
    t = tree_metrics(branches, eps, e_m)
    assert all(in_unit(r) for r in t.r_profile)
    assert in_unit(t.p_z) and in_unit(t.p_x) and in_unit(t.p_general)
    for e in (*t.err_profile, t.e_z, t.e_x):
        assert e is None or 0.0 <= e <= 0.5


@given(trees)
def test_success_is_non_increasing_in_loss(branches):
    grid = np.linspace(0.0, 1.0, 41)
    series = [tree_metrics(branches, float(eps), 0.0) for eps in grid]
    for field in ("fail_z", "fail_x", "fail_general"):
        values = [getattr(t, field) for t in series]
        assert all(b >= a - 1e-15 for a, b in zip(values, values[1:])), field
    for k in range(len(branches) + 1):
        values = [t.r_profile[k] for t in series]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))


@given(trees, losses)
def test_general_measurement_is_hardest(branches, eps):
    t = tree_metrics(branches, eps, 0.0)
    assert t.p_general <= t.p_z + 1e-15
    assert t.p_general <= t.p_x + 1e-15


@given(trees, losses)
def test_error_free_measurements_stay_error_free(branches, eps):
    t = tree_metrics(branches, eps, 0.0)
    assert t.e_z == 0.0
    assert all(e in (0.0, None) for e in (*t.err_profile, t.e_x))


@given(trees, meas_errors)
def test_lossless_tree_always_succeeds(branches, e_m):
    t = tree_metrics(branches, 0.0, e_m)
    assert t.p_z == t.p_x == t.p_general == 1.0


@given(trees, st.floats(0.0, 0.95))
def test_binomial_terms_sum_to_indirect_success(branches, eps):
    r = tree_metrics(branches, eps, 0.0).r_profile + (0.0,)
    b = branches + (0,)
    for k in range(len(branches)):
        s = (1 - eps) * (1 - eps + eps * r[k + 2]) ** b[k + 1]
        total = fsum(comb(b[k], mk) * s**mk * (1 - s) ** (b[k] - mk) for mk in range(1, b[k] + 1))
        assert total == pytest.approx(r[k], rel=1e-12, abs=1e-15)


# -- preparation -------------------------------------------------------------------
devices = st.tuples(probabilities, probabilities, probabilities)


@given(devices, st.floats(0.0, 200.0))
def test_fusion_bounds_are_ordered(dev, steps):
    eta_s, eta_d, p_step = dev
    p = SourceDetectorParams(eta_s, eta_d, 150e-9, p_step)
    lower, upper = fusion_success_bounds(p, steps)
    assert lower <= upper
    if p_step**steps == 1.0:
        assert lower == upper


@given(devices)
def test_ghz_success_is_bounded(dev):
    success, loss = ghz_source_stats(SourceDetectorParams(dev[0], dev[1], 150e-9, dev[2]))
    assert 0.0 <= success <= 1 / 32
    assert in_unit(loss)


@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.9, 1.0), st.integers(1, 6), st.floats(0.0, 30.0))
def test_complete_state_costs_at_least_the_star_state(eta_s, eta_d, p_step, m, steps):
    p = SourceDetectorParams(eta_s, eta_d, 150e-9, p_step)
    q_s = star_state_photon_bound(m, (2, 3), p, 0.5)
    assume(math.isfinite(q_s))
    assert complete_state_photon_bound(q_s, m, p, steps) >= q_s


@given(st.integers(1, 40), trees, st.floats(0.0, 1e-6))
def test_complete_state_takes_one_more_step(m, branches, tau_a):
    est = prep_estimate(m, branches, SourceDetectorParams(1.0, 1.0, tau_a, 1.0))
    assert est.tau_c - est.tau_s == pytest.approx(tau_a, rel=0, abs=math.ulp(est.tau_c) + 5e-324)


# -- repeater ---------------------------------------------------------------------
@st.composite
def configs(draw):
    eta = draw(st.floats(0.9, 1.0))
    hw = HardwareParams(eta, eta)
    L0 = draw(st.sampled_from([2.0, 4.0, 8.0]))
    segments = draw(st.integers(1, 300))
    e_d = draw(st.floats(0.0, 1e-3))
    tree = draw(st.lists(st.integers(1, 12), min_size=2, max_size=3).map(tuple))
    return make_config(draw(st.integers(1, 30)), tree, hw, LinkParams(L0 * segments, L0, e_d))


@given(configs())
def test_pair_error_identities(config):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            r = evaluate(config)
        except StageError:
            assume(False)
    assert r.e_x == r.e_z
    assert r.fidelity + r.e_x + r.e_y + r.e_z == pytest.approx(1.0, rel=0, abs=4 * 2**-53)
    assert r == evaluate(config)
    if math.isfinite(r.q_bar):
        assert r.q_bar * r.p == pytest.approx(r.photons_per_trial, rel=2**-51)


@given(st.integers(1, 2000), st.floats(1e-9, 1e-3))
def test_small_error_regime(n, e_d):
    e_m = 2 * e_d / 3
    assume(e_m * (n + 1) <= 0.01)
    e = final_pair_errors(e_m, 0.0, 0.0, 5, n)
    assert e.e_z == pytest.approx((n + 1) * e_m, rel=0.05)


# -- optimizer ---------------------------------------------------------------------
@settings(max_examples=15)
@given(
    st.integers(1, 20),
    st.tuples(st.integers(1, 8), st.integers(1, 8)),
    st.sampled_from([None, 0.9, 0.97]),
    st.sampled_from([(1000.0, 4.0), (200.0, 2.0), (40.0, 8.0)]),
)
def test_optimizer_is_never_beaten_on_its_grid(m0, b0, min_fidelity, cell):
    space = SearchSpace((m0, m0 + 2), ((b0[0], b0[0] + 2), (b0[1], b0[1] + 1)), Constraints(min_fidelity=min_fidelity))
    hw = HardwareParams(0.98, 0.98)
    link = LinkParams(cell[0], cell[1], 4.2e-5)
    result = optimize(space, hw, link)
    assert result == optimize(space, hw, link, threads=3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        feasible = []
        for m in range(m0, m0 + 3):
            for b_0 in range(b0[0], b0[0] + 3):
                for b_1 in range(b0[1], b0[1] + 2):
                    try:
                        r = evaluate(make_config(m, (b_0, b_1), hw, link))
                    except StageError:
                        continue
                    if r.epsilon0 < 0.5 and math.isfinite(r.q_bar) and space.constraints.satisfied_by(r):
                        feasible.append(r.q_bar)
    assert result.feasible == bool(feasible)
    if feasible:
        assert result.best_metrics.q_bar <= min(feasible) * (1 + 1e-12)


# -- Monte Carlo -------------------------------------------------------------------
@settings(max_examples=20)
@given(st.lists(st.integers(1, 3), min_size=2, max_size=3).map(tuple), st.floats(0.0, 0.6), st.floats(0.0, 0.1), st.integers(0, 2**64 - 1))
def test_sampling_is_reproducible_across_threads(branches, eps, e_m, seed):
    trials = 40_000
    a = tree_measurement_counts(branches, eps, e_m, "X", McSettings(trials, seed=seed, threads=1))
    b = tree_measurement_counts(branches, eps, e_m, "X", McSettings(trials, seed=seed, threads=2))
    assert np.array_equal(a, b)
    assert a[:, 0].sum() == trials and (a[:, 2] <= a[:, 1]).all()


# -- stabilizer tableau ------------------------------------------------------------
@st.composite
def graphs(draw):
    n = draw(st.integers(1, 6))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    edges = [p for p in pairs if draw(st.booleans())]
    return n, edges


@settings(max_examples=40)
@given(graphs(), st.data())
def test_tableau_tracks_the_state_vector(graph, data):
    n, edges = graph
    t, psi = graph_state(n, edges), sv.graph_state_vector(n, edges)
    for _ in range(data.draw(st.integers(0, 8))):
        q = data.draw(st.integers(0, n - 1))
        op = data.draw(st.sampled_from(["h", "s", "measure"] + (["cz"] if n > 1 else [])))
        if op == "h":
            t, psi = t.h(q), sv.apply_h(psi, q)
        elif op == "s":
            t, psi = t.s(q), sv.apply_phase(psi, q, 1)
        elif op == "cz":
            other = data.draw(st.integers(0, n - 1).filter(lambda v: v != q))
            t, psi = t.cz(q, other), sv.apply_cz(psi, q, other)
        else:
            p = Pauli.single(n, q, data.draw(st.sampled_from("XYZ")))
            outcome, prob, after = t.measure(p, data.draw(st.integers(0, 1)))
            vpsi, vprob = sv.project(psi, p, outcome)
            assert vprob == pytest.approx(prob, abs=1e-12)
            if after is None:
                continue
            t, psi = after, vpsi
        assert t.is_valid()
        assert sv.same_ray(psi, sv.tableau_to_vector(t))
