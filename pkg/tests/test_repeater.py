import json
import math
import warnings
from pathlib import Path

import pytest

import oracles
from conftest import CASE_HW, PUBLISHED_POINTS, published_config
from photonic_repeater.repeater import (
    HardwareParams,
    LinkParams,
    StageError,
    bell_success,
    compose_depolarizing,
    direct_transmission_cost,
    direct_transmission_years,
    effective_loss,
    evaluate,
    final_pair_errors,
    make_config,
    max_photon_lifetime,
    memory_time,
    pair_rate,
    photons_per_pair,
    scaling_upper_bound,
    survival_per_step,
    trial_success,
)

GOLDEN = json.loads((Path(__file__).parent / "golden" / "pipeline.json").read_text())


class TestSurvivalPerStep:
    def test_no_storage_time(self):
        assert survival_per_step(HardwareParams(1.0, 1.0, tau_a=0.0)) == 1.0

    def test_default_hardware(self):
        assert survival_per_step(CASE_HW) == pytest.approx(math.exp(-30 / 22000), rel=1e-15)
        assert survival_per_step(CASE_HW) == pytest.approx(0.998637, abs=5e-7)

    def test_long_attenuation_length(self):
        assert survival_per_step(HardwareParams(1.0, 1.0, l_att=1e300)) == 1.0


class TestEffectiveLoss:
    @pytest.mark.parametrize(
        "name, lo, hi",
        [("case1_5000km", 0.195, 0.205), ("case2_5000km", 0.265, 0.275), ("munro_800km", 0.245, 0.255)],
    )
    def test_published_chains(self, name, lo, hi):
        assert lo <= effective_loss(published_config(name)) <= hi

    @pytest.mark.parametrize("name", sorted(PUBLISHED_POINTS))
    def test_matches_literal_formula(self, name):
        hw, L, L0, e_d, m, branches = PUBLISHED_POINTS[name]
        ref = oracles.effective_loss(L0, m, branches, hw.eta_s, hw.eta_d, hw.tau_a, hw.c, hw.l_att)
        assert effective_loss(published_config(name)) == pytest.approx(float(ref), rel=1e-12)


class TestBellAndTrial:
    @pytest.mark.parametrize("eps, p_b", [(0.0, 0.5), (1.0, 0.0), (0.1987, 0.3210)])
    def test_bell_success(self, eps, p_b):
        assert bell_success(eps) == pytest.approx(p_b, abs=5e-5)

    def test_certain_trial(self):
        assert trial_success(1.0, 1.0, 1.0, 7, 10) == 1.0

    @pytest.mark.parametrize("pz, px, pb, m, n", [(0.999, 0.99, 0.32, 24, 1249), (0.9, 0.8, 0.2, 3, 4), (1.0, 1.0, 0.5, 1, 0)])
    def test_matches_literal_product(self, pz, px, pb, m, n):
        ref = oracles.trial_success(pz, px, pb, m, n)
        assert trial_success(pz, px, pb, m, n) == pytest.approx(float(ref), rel=1e-11)

    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            trial_success(1.2, 1.0, 0.5, 1, 1)

    @pytest.mark.parametrize("p, rate", [(1.0, 1e5), (0.69, 69e3), (0.60, 60e3)])
    def test_rate(self, p, rate):
        assert pair_rate(p, 1e5) == pytest.approx(rate, rel=1e-12)


class TestPhotonBudget:
    def test_end_photons_only(self):
        assert photons_per_pair(1, 0, 999, 1.0) == 2.0

    def test_zero_success_is_infinite(self):
        assert photons_per_pair(1, 3, 10, 0.0) == math.inf

    def test_munro_per_node_count(self):
        r = evaluate(published_config("munro_800km"))
        assert 2 * r.m * (r.tree.q_l + 1) == 24440
        assert (r.photons_per_trial - 2 * r.m) // r.n == 24440

    def test_numerator_is_an_integer_count(self, published_point):
        _, config = published_point
        r = evaluate(config)
        assert isinstance(r.photons_per_trial, int)
        assert r.q_bar * r.p == pytest.approx(r.photons_per_trial, rel=2**-51)


class TestTiming:
    def test_zero_lifetime(self):
        assert max_photon_lifetime(0.0, 0.0, 0.0, 2e8) == 0.0

    def test_strategy_b(self):
        assert memory_time("b", 1000.0, 4.0, 2e8, 150e-9) == pytest.approx(10e-3, abs=0.1e-3)

    def test_strategy_a(self):
        assert memory_time("a", 0.0, 0.0, 2e8, 0.0) == 0.0
        assert memory_time("a", 1000.0, 4.0, 2e8, 150e-9) == pytest.approx(10e-6 + 0.3e-6 + 5e-3, rel=1e-12)

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            memory_time("c", 1.0, 1.0, 2e8, 0.0)


class TestPairErrors:
    def test_error_free(self):
        e = final_pair_errors(0.0, 0.0, 0.0, 5, 10)
        assert (e.e_x, e.e_y, e.e_z, e.fidelity) == (0.0, 0.0, 0.0, 1.0)

    @pytest.mark.parametrize(
        "e_m, ex, ez, m, n",
        [(2.8e-5, 2.5e-6, 1.6e-7, 24, 1249), (2.05e-4, 1e-4, 1.4e-5, 20, 129), (1e-2, 3e-2, 1e-2, 3, 4)],
    )
    def test_matches_printed_expressions(self, e_m, ex, ez, m, n):
        EX, EY, EZ, F = oracles.pair_errors(e_m, ex, ez, m, n)
        got = final_pair_errors(e_m, ex, ez, m, n)
        assert got.e_x == pytest.approx(float(EX), rel=1e-10)
        assert got.e_y == pytest.approx(float(EY), rel=1e-9)
        assert got.e_z == got.e_x
        assert got.fidelity == pytest.approx(float(F), rel=1e-12)

    def test_small_error_regime(self):
        # Ē_Z ≈ (n + 1) · 2 e_d / 3 when the tree errors vanish
        e_d, n = 1e-6, 999
        e = final_pair_errors(2 * e_d / 3, 0.0, 0.0, 10, n)
        assert e.e_z == pytest.approx((n + 1) * 2 * e_d / 3, rel=0.05)


class TestComposeDepolarizing:
    def test_single_segment(self):
        assert compose_depolarizing(4.2e-5, 1) == pytest.approx(4.2e-5, rel=1e-12)

    def test_two_segments_nearly_double(self):
        assert compose_depolarizing(4.2e-5, 2) == pytest.approx(8.4e-5, rel=1e-4)


class TestEvaluate:
    def test_case_i_5000km(self):
        r = evaluate(published_config("case1_5000km"))
        assert r.n == 1249 and r.m == 24 and r.tree.q_l == 464
        assert r.p == pytest.approx(0.69, abs=0.01)
        assert r.rate == pytest.approx(69e3, abs=1e3)
        assert r.q_bar == pytest.approx(4.0e7, rel=0.03)
        assert r.e_x == pytest.approx(3.5e-2, rel=0.05)

    def test_case_i_1000km(self):
        r = evaluate(published_config("case1_1000km"))
        assert r.n == 249
        assert r.p == pytest.approx(0.58, abs=0.01)
        assert r.e_z == pytest.approx(8.9e-3, rel=0.05)
        assert r.fidelity == pytest.approx(0.97, abs=0.01)

    def test_case_ii_5000km(self):
        r = evaluate(published_config("case2_5000km"))
        assert r.q_bar == pytest.approx(7.6e7, rel=0.03)
        assert r.p == pytest.approx(0.65, abs=0.01)

    def test_chain_matches_independent_pieces(self, published_point):
        _, config = published_point
        r = evaluate(config)
        hw, link = config.hardware, config.link
        assert r.epsilon0 == effective_loss(config)
        assert r.p_b == bell_success(r.epsilon0)
        ref_p = oracles.trial_success(r.tree.p_z, r.tree.p_x, r.p_b, r.m, r.n)
        assert r.p == pytest.approx(float(ref_p), rel=1e-9)
        assert r.rate == pair_rate(r.p, hw.f)
        assert r.t_mem_b == memory_time("b", link.L, link.L0, hw.c, hw.tau_a)
        assert r.fidelity + r.e_x + r.e_y + r.e_z == pytest.approx(1.0, rel=0, abs=4 * 2**-53)

    def test_deterministic(self, published_point):
        _, config = published_point
        assert evaluate(config) == evaluate(config)

    def test_ideal_configuration(self):
        hw = HardwareParams(1.0, 1.0, tau_a=0.0)
        r = evaluate(make_config(2, (2, 2), hw, LinkParams(3e-9, 1e-9, 0.0)))
        assert r.p_b == pytest.approx(0.5, abs=1e-9)
        assert (r.e_x, r.e_y, r.e_z, r.fidelity) == (0.0, 0.0, 0.0, 1.0)

    def test_stage_is_reported(self):
        hw = HardwareParams(0.0, 1.0)
        with pytest.raises(StageError) as info, pytest.warns(UserWarning, match="epsilon0"):
            evaluate(make_config(2, (2, 2), hw, LinkParams(8.0, 4.0, 0.0)))
        assert info.value.stage == "pair_errors"

    def test_non_integer_node_count_warns(self):
        link = LinkParams(250.0, 4.0, 0.0)
        with pytest.warns(UserWarning, match="not an integer"):
            assert link.n == 61

    def test_integer_node_count_is_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert LinkParams(1000.0, 4.0).n == 249

    @pytest.mark.parametrize("kwargs", [{"L": 1.0, "L0": 2.0}, {"L": 10.0, "L0": 0.0}, {"L": 8.0, "L0": 4.0, "e_d": 0.8}])
    def test_link_validation(self, kwargs):
        with pytest.raises(ValueError):
            LinkParams(**kwargs)


class TestDirectTransmission:
    def test_zero_distance(self):
        assert direct_transmission_cost(0.0, 1e10, 22.0) == (1.0, 1e-10)

    def test_5000km(self):
        photons, _ = direct_transmission_cost(5000.0, 1e10, 22.0)
        assert 5.1e98 / 2 <= photons <= 5.1e98 * 2
        years = direct_transmission_years(5000.0, 1e10, 22.0)
        assert 1e81 / 2 <= years <= 1e81 * 2

    def test_1000km(self):
        photons, _ = direct_transmission_cost(1000.0, 1e10, 22.0)
        assert photons == pytest.approx(5.5e19, rel=0.1)
        assert direct_transmission_years(1000.0, 1e10, 22.0) == pytest.approx(175, abs=10)


class TestScalingBound:
    def test_golden(self):
        g = GOLDEN["scaling_bound"]
        m_choice, q_upp = scaling_upper_bound(g["n"], g["p_b"], g["x"])
        assert m_choice == pytest.approx(g["m_choice"], rel=1e-12)
        assert q_upp == pytest.approx(g["q_upp"], rel=1e-12)
        assert m_choice > 0 and math.isfinite(q_upp) and q_upp > 0

    def test_reliable_bell_measurement(self):
        m_choice, q_upp = scaling_upper_bound(10, 0.999999, 1.0)
        assert m_choice < 1 and math.isfinite(q_upp)

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_polynomial_in_n(self, x):
        ns = (100, 1000, 10000)
        qs = [scaling_upper_bound(n, 0.32, x)[1] for n in ns]
        slope = (math.log(qs[-1]) - math.log(qs[0])) / (math.log(ns[-1]) - math.log(ns[0]))
        # leading behaviour n^(1 + 2x) times logarithms
        assert slope < 2 * x + 2

    @pytest.mark.parametrize("args", [(0, 0.3, 1.0), (10, 0.0, 1.0), (10, 1.0, 1.0), (10, 0.3, 0.0)])
    def test_domain(self, args):
        with pytest.raises(ValueError):
            scaling_upper_bound(*args)
