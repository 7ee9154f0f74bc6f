import math

import numpy as np
import pytest

from bellrecycle import (
    BudgetTooSmall,
    DomainError,
    GENERAL_BIASED,
    LengthMismatch,
    REGION2_ANSATZ,
    UNBIASED,
    UNBIASED_SINGLET,
    UNBIASED_SINGLET_EQUATORIAL,
    boundary_curve,
    boundary_point,
    chsh_value,
    decode_params,
    evaluate_scenario,
    from_reversibility_angle,
    region1_closed,
    region3_curve,
    search_mode,
)
from bellrecycle.optimizer import make_batch_evaluator

ROOT2 = math.sqrt(2.0)


class TestSearchMode:
    def test_lookup(self):
        assert search_mode("unbiased-singlet") is UNBIASED_SINGLET
        assert search_mode("general-biased").n_params == 17

    def test_unknown(self):
        with pytest.raises(DomainError):
            search_mode("simulated-annealing")

    @pytest.mark.parametrize(
        "mode,expected",
        [
            (GENERAL_BIASED, 17),
            (UNBIASED, 13),
            (UNBIASED_SINGLET, 12),
            (UNBIASED_SINGLET_EQUATORIAL, 8),
            (REGION2_ANSATZ, 4),
        ],
    )
    def test_parameter_counts(self, mode, expected):
        assert mode.n_params == expected


class TestDecodeParams:
    def test_all_zero_unbiased_singlet(self):
        cfg = decode_params(UNBIASED_SINGLET, np.zeros(12))
        assert cfg.alice.first.strength == 0.0
        assert cfg.bob.second.strength == 0.0
        assert np.allclose(cfg.state.T, -np.eye(3))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            decode_params(UNBIASED_SINGLET, np.zeros(11))

    def test_optimal_chsh_encoding(self):
        # strengths 1 at the optimal directions: x along +x, x' along +y,
        # y/y' along the diagonals of the x-y plane
        params = np.array(
            [1.0, 1.0, 1.0, 1.0]
            + [math.pi / 2, 0.0]
            + [math.pi / 2, math.pi / 2]
            + [math.pi / 2, math.pi + math.pi / 4]
            + [math.pi / 2, math.pi - math.pi / 4]
        )
        cfg = decode_params(UNBIASED_SINGLET, params)
        assert chsh_value(cfg.state, cfg.alice, cfg.bob) == pytest.approx(
            2 * ROOT2, abs=1e-12
        )

    def test_biased_mode_chart(self):
        r, frac = 0.5, 1.0
        params = np.zeros(17)
        params[0], params[1] = r, frac
        params[2], params[3] = math.pi / 2, 0.0
        cfg = decode_params(GENERAL_BIASED, params)
        s_expected, b_expected = from_reversibility_angle(r, frac * math.asin(r))
        assert cfg.alice.first.strength == pytest.approx(s_expected, abs=1e-12)
        assert cfg.alice.first.bias == pytest.approx(b_expected, abs=1e-12)
        assert b_expected == pytest.approx(0.25, abs=1e-12)

    def test_batch_evaluator_matches_decode(self):
        rng = np.random.default_rng(3)
        for mode in (UNBIASED_SINGLET, UNBIASED, GENERAL_BIASED, UNBIASED_SINGLET_EQUATORIAL):
            evaluate = make_batch_evaluator(mode)
            P = rng.uniform(0.05, 0.95, size=(20, mode.n_params))
            s1, sstar = evaluate(P)
            for i in range(20):
                res = evaluate_scenario(decode_params(mode, P[i]))
                assert res.s_first == pytest.approx(s1[i], abs=1e-10)
                assert res.s_star_second == pytest.approx(sstar[i], abs=1e-10)


class TestBoundaryPoint:
    def test_determinism(self):
        a = boundary_point(1.3, UNBIASED_SINGLET, budget=12_000, seed=5)
        b = boundary_point(1.3, UNBIASED_SINGLET, budget=12_000, seed=5)
        assert a == b

    def test_unconstrained_end(self):
        point = boundary_point(0.0, UNBIASED_SINGLET, budget=20_000, seed=1)
        assert point.s_star == pytest.approx(2 * ROOT2, abs=1e-6)
        assert point.achieved_s <= 1e-4

    def test_tsirelson_end(self):
        point = boundary_point(2 * ROOT2, UNBIASED_SINGLET, budget=40_000, seed=1)
        assert point.s_star == pytest.approx(1 / ROOT2, abs=5e-3)

    def test_matches_region1(self):
        point = boundary_point(1.0, UNBIASED_SINGLET, budget=20_000, seed=2)
        assert abs(point.achieved_s - 1.0) <= 1e-4
        assert point.s_star == pytest.approx(region1_closed(1.0), abs=1e-2)

    def test_feasibility(self):
        point = boundary_point(1.7, UNBIASED_SINGLET, budget=50_000, seed=3)
        assert abs(point.achieved_s - 1.7) <= 1e-4

    def test_params_reproduce_values(self):
        point = boundary_point(0.8, UNBIASED_SINGLET, budget=12_000, seed=9)
        res = evaluate_scenario(decode_params(UNBIASED_SINGLET, point.params))
        assert abs(res.s_first) == pytest.approx(point.achieved_s, abs=1e-12)
        assert res.s_star_second == pytest.approx(point.s_star, abs=1e-12)

    def test_budget_too_small(self):
        with pytest.raises(BudgetTooSmall):
            boundary_point(1.0, UNBIASED_SINGLET, budget=5000)

    def test_target_domain(self):
        with pytest.raises(DomainError):
            boundary_point(3.0, UNBIASED_SINGLET)

    def test_region2_ansatz_mode(self):
        point = boundary_point(2.4, REGION2_ANSATZ, budget=15_000, seed=4)
        assert abs(point.achieved_s - 2.4) <= 1e-4
        # the four-parameter ansatz must dominate the region-3 formula here
        assert point.s_star > region3_curve(2.4) + 0.05

    def test_equatorial_mode_matches_full(self):
        full = boundary_point(1.5, UNBIASED_SINGLET, budget=30_000, seed=6)
        flat = boundary_point(1.5, UNBIASED_SINGLET_EQUATORIAL, budget=30_000, seed=6)
        assert flat.s_star == pytest.approx(full.s_star, abs=2e-2)


class TestModeAgreement:
    def test_unbiased_matches_singlet_restriction(self):
        # adding the state parameter must not move the boundary
        free = boundary_point(1.0, UNBIASED, budget=60_000, seed=8)
        fixed = boundary_point(1.0, UNBIASED_SINGLET, budget=60_000, seed=8)
        assert free.s_star == pytest.approx(fixed.s_star, abs=2e-2)

    def test_biased_matches_unbiased_in_violating_region(self):
        biased = boundary_point(2.8, GENERAL_BIASED, budget=100_000, seed=8)
        unbiased_pt = boundary_point(2.8, UNBIASED, budget=100_000, seed=8)
        assert biased.s_star == pytest.approx(unbiased_pt.s_star, abs=2e-2)


class TestBoundaryCurve:
    def test_matches_pointwise_calls(self):
        grid = [0.9, 1.8]
        curve = boundary_curve(grid, UNBIASED_SINGLET, budget=12_000, seed=11)
        singles = [boundary_point(g, UNBIASED_SINGLET, budget=12_000, seed=11) for g in grid]
        assert curve == singles

    def test_parallel_workers_agree(self):
        grid = [0.7, 2.0]
        serial = boundary_curve(grid, UNBIASED_SINGLET, budget=11_000, seed=13, workers=1)
        parallel = boundary_curve(grid, UNBIASED_SINGLET, budget=11_000, seed=13, workers=2)
        assert serial == parallel

    def test_empty_grid_rejected(self):
        with pytest.raises(DomainError):
            boundary_curve([], UNBIASED_SINGLET)
