import itertools
import warnings

import numpy as np
import pytest

import photonic_repeater.optimize as opt
from conftest import CASE_HW, E_D, E_D_8KM, MUNRO_HW, published_config
from photonic_repeater.optimize import Constraints, SearchSpace, grid_costs, optimize, sweep, with_constraints
from photonic_repeater.repeater import HardwareParams, LinkParams, StageError, evaluate, make_config


def neighbourhood(m, branches, radius=4, constraints=Constraints()):
    lo = lambda v: max(1, v - radius)  # noqa: E731
    ranges = [(lo(b), b + radius) for b in branches[:2]] + [(1, 3)]
    return SearchSpace((lo(m), m + radius), tuple(ranges), constraints)


def rescan(space, hardware, link):
    """Plain loop over every grid point: (q_bar, config tuple) of the feasible ones."""
    found = []
    lows = [space.m_range] + list(space.branch_ranges)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for point in itertools.product(*(range(lo, hi + 1) for lo, hi in lows)):
            m, branches = point[0], point[1:]
            try:
                r = evaluate(make_config(m, branches, hardware, link))
            except StageError:
                continue
            if r.epsilon0 < 0.5 and space.constraints.satisfied_by(r):
                found.append((r.q_bar, point))
    return found


def key(result):
    return result.best_config.m, result.best_config.tree.branches


class TestGridCosts:
    def test_vectorised_costs_match_full_evaluation(self):
        space = SearchSpace((3, 6), ((2, 5), (2, 4)))
        link = LinkParams(1000.0, 4.0, E_D)
        q_bar, rate, eps = grid_costs(space, CASE_HW, link)
        for flat, point in enumerate(itertools.product(range(3, 7), range(2, 6), range(2, 5))):
            r = evaluate(make_config(point[0], point[1:], CASE_HW, link))
            assert q_bar[flat] == pytest.approx(r.q_bar, rel=1e-12)
            assert rate[flat] == pytest.approx(r.rate, rel=1e-12)
            assert eps[flat] == pytest.approx(r.epsilon0, rel=1e-14)


class TestOptimality:
    @pytest.mark.parametrize("min_fidelity", [None, 0.95, 0.965])
    def test_exhaustive_rescan(self, min_fidelity):
        space = SearchSpace((15, 21), ((9, 13), (9, 13), (1, 2)), Constraints(min_fidelity=min_fidelity))
        link = LinkParams(1000.0, 4.0, E_D)
        result = optimize(space, CASE_HW, link)
        feasible = rescan(space, CASE_HW, link)
        assert result.feasible == bool(feasible)
        best_q, best_point = min(feasible)
        # nothing on the grid is strictly cheaper, up to rounding of the two cost paths
        assert result.best_metrics.q_bar <= best_q * (1 + 1e-12)
        assert space.constraints.satisfied_by(result.best_metrics)
        assert result.evaluated >= 1 and result.candidates == space.size

    def test_frontier_is_cost_ordered(self):
        space = SearchSpace((15, 21), ((9, 13), (9, 13), (1, 2)))
        result = optimize(space, CASE_HW, LinkParams(1000.0, 4.0, E_D), frontier_size=10)
        costs = [m.q_bar for _, m in result.frontier]
        assert costs == sorted(costs) and len(costs) <= 10

    def test_tie_break_prefers_smallest_configuration(self):
        hw = HardwareParams(1.0, 1.0, tau_a=0.0)
        # n = 0: tree size never enters the cost, so every b ties at fixed m
        space = SearchSpace((1, 2), ((1, 2), (1, 2)))
        result = optimize(space, hw, LinkParams(1e-9, 1e-9, 0.0))
        assert result.feasible
        assert key(result) == (1, (1, 1))


class TestPublishedNeighbourhoods:
    def test_pinned_space_returns_the_pinned_point(self):
        space = SearchSpace.pinned(24, (16, 14, 1))
        result = optimize(space, CASE_HW, LinkParams(5000.0, 4.0, E_D))
        assert key(result) == (24, (16, 14, 1))
        assert result.best_metrics == evaluate(published_config("case1_5000km"))

    @pytest.mark.parametrize(
        "name, L, L0, e_d, m, branches, min_fidelity",
        [
            ("case1_5000km", 5000.0, 4.0, E_D, 24, (16, 14, 1), 0.88),
            ("case1_1000km", 1000.0, 4.0, E_D, 19, (11, 11, 1), 0.9),
            ("case2_5000km", 5000.0, 8.0, E_D_8KM, 27, (17, 28, 2), None),
            ("case2_1000km", 1000.0, 8.0, E_D_8KM, 21, (12, 23, 2), None),
        ],
    )
    def test_published_choice_is_the_optimum(self, name, L, L0, e_d, m, branches, min_fidelity):
        space = neighbourhood(m, branches, constraints=Constraints(min_fidelity=min_fidelity))
        result = optimize(space, CASE_HW, LinkParams(L, L0, e_d))
        assert result.feasible
        assert key(result) == (m, branches)

    def test_munro_point_is_never_beaten(self):
        published = evaluate(published_config("munro_800km"))
        space = neighbourhood(20, (10, 20, 2), constraints=Constraints(min_fidelity=published.fidelity))
        result = optimize(space, MUNRO_HW, LinkParams(799.5, 6.15, 3.08e-4))
        assert result.feasible
        assert result.best_metrics.q_bar <= published.q_bar
        assert result.best_metrics.q_bar <= 5.3e6 * 1.05


class TestDeterminism:
    def test_thread_count_does_not_matter(self, monkeypatch):
        monkeypatch.setattr(opt, "_CHUNK", 97)
        space = SearchSpace((15, 21), ((9, 13), (9, 13), (1, 2)), Constraints(min_fidelity=0.95))
        link = LinkParams(1000.0, 4.0, E_D)
        results = [optimize(space, CASE_HW, link, threads=t) for t in (1, 2, 5)]
        assert results[0] == results[1] == results[2]

    def test_repeat_runs_are_identical(self):
        space = neighbourhood(19, (11, 11, 1), radius=2)
        link = LinkParams(1000.0, 4.0, E_D)
        assert optimize(space, CASE_HW, link) == optimize(space, CASE_HW, link)


class TestFailureModes:
    def test_infeasible_reports_cheapest_candidate(self):
        space = SearchSpace((15, 17), ((9, 11), (9, 11), (1, 1)), Constraints(min_fidelity=0.9999))
        result = optimize(space, CASE_HW, LinkParams(1000.0, 4.0, E_D))
        assert not result.feasible
        assert result.best_config is not None and result.best_metrics is not None
        assert result.best_metrics.fidelity < 0.9999
        assert "no candidate" in result.message

    def test_rate_floor_prunes_everything(self):
        space = with_constraints(SearchSpace((15, 17), ((9, 11), (9, 11))), min_rate=2e5)
        result = optimize(space, CASE_HW, LinkParams(1000.0, 4.0, E_D))
        assert not result.feasible and result.evaluated == 0

    def test_hopeless_loss_gives_no_candidate(self):
        # eps >= 0.5 everywhere: no candidate can be evaluated
        space = SearchSpace((2, 3), ((2, 3), (2, 3)))
        result = optimize(space, CASE_HW, LinkParams(400.0, 200.0, 0.0))
        assert not result.feasible and result.best_config is None

    def test_refuses_huge_spaces(self):
        space = SearchSpace((1, 1000), ((1, 1000), (1, 1000)))
        with pytest.raises(ValueError, match="limit"):
            optimize(space, CASE_HW, LinkParams(1000.0, 4.0))

    def test_non_integer_spacing_warns(self):
        with pytest.warns(UserWarning, match="rounded node count"):
            optimize(SearchSpace.pinned(3, (2, 2)), CASE_HW, LinkParams(250.0, 4.0))

    @pytest.mark.parametrize("m_range, ranges", [((0, 3), ((1, 2),)), ((3, 2), ((1, 2),)), ((1, 2), ()), ((1, 2), ((2, 1),))])
    def test_space_validation(self, m_range, ranges):
        with pytest.raises(ValueError):
            SearchSpace(m_range, ranges)


class TestSweep:
    def test_single_cell_equals_optimize(self):
        space = neighbourhood(19, (11, 11, 1), radius=2)
        row = sweep([(1000.0, 4.0)], space, CASE_HW, e_d=E_D)[0]
        assert row.status == "optimal"
        assert row.result == optimize(space, CASE_HW, LinkParams(1000.0, 4.0, E_D))

    def test_pinned_cells_reproduce_published_rows(self):
        space = SearchSpace.pinned(24, (16, 14, 1))
        rows = sweep([(1000.0, 4.0, E_D), (5000.0, 4.0, E_D)], space, CASE_HW)
        assert [r.L for r in rows] == [1000.0, 5000.0]
        assert rows[1].result.best_metrics == evaluate(published_config("case1_5000km"))

    def test_bad_cell_is_annotated_and_others_survive(self):
        space = SearchSpace.pinned(19, (11, 11, 1))
        rows = sweep([(1000.0, 4.0), (1.0, 4.0), (500.0, 4.0)], space, CASE_HW, e_d=E_D)
        assert [r.status for r in rows] == ["optimal", "error", "optimal"]
        assert "L0" in rows[1].error and rows[1].result is None

    def test_scaling_rows_are_polynomial(self):
        space = SearchSpace((1, 40), ((1, 30), (1, 30), (1, 3)))
        Ls = (250.0, 500.0, 1000.0, 2000.0, 4000.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rows = sweep([(L, 4.0) for L in Ls], space, CASE_HW, e_d=E_D)
        q = np.array([r.result.best_metrics.q_bar for r in rows])
        slope = np.polyfit(np.log(Ls), np.log(q), 1)[0]
        assert all(r.status == "optimal" for r in rows)
        assert slope < 4
