import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellrecycle import (
    AngleOutOfRange,
    ConstraintViolation,
    InvalidBloch,
    ZeroDirection,
    decoherence,
    expectation,
    fidelity_bound,
    from_reversibility_angle,
    make_observable,
    projective,
    reversibility,
    reversibility_profile,
    trivial,
    unbiased,
)


def valid_bias_strength():
    """Strategy for (bias, strength) pairs inside the constraint triangle."""
    return st.tuples(
        st.floats(0.0, 1.0), st.floats(-1.0, 1.0)
    ).map(lambda t: (t[1] * (1.0 - t[0]), t[0]))


class TestMakeObservable:
    def test_projective_z(self):
        obs = make_observable(0.0, 1.0, (0, 0, 1))
        assert obs.strength == 1.0 and obs.bias == 0.0
        assert np.array_equal(obs.direction, [0, 0, 1])

    def test_strength_plus_bias_constraint(self):
        with pytest.raises(ConstraintViolation):
            make_observable(0.5, 0.6, (1, 0, 0))

    def test_direction_normalised(self):
        obs = make_observable(0.2, 0.6, (0, 2, 0))
        assert np.allclose(obs.direction, [0, 1, 0], atol=1e-15)

    def test_zero_strength_gets_canonical_direction(self):
        obs = make_observable(0.3, 0.0, (5, 5, 5))
        assert np.array_equal(obs.direction, [0, 0, 1])

    def test_zero_direction_rejected(self):
        with pytest.raises(ZeroDirection):
            make_observable(0.0, 0.5, (0, 0, 0))

    def test_range_checks(self):
        with pytest.raises(ConstraintViolation):
            make_observable(0.0, 1.5, (0, 0, 1))
        with pytest.raises(ConstraintViolation):
            make_observable(-1.2, 0.0, (0, 0, 1))

    def test_direction_is_immutable(self):
        obs = projective((1, 0, 0))
        with pytest.raises(ValueError):
            obs.direction[0] = 2.0


class TestReversibility:
    def test_projective_is_irreversible(self):
        assert reversibility(projective((0, 0, 1))) == 0.0

    def test_trivial_is_fully_reversible(self):
        assert reversibility(trivial(0.3)) == 1.0

    def test_generic_value(self):
        # 0.5*sqrt(1.2^2 - 0.36) + 0.5*sqrt(0.8^2 - 0.36), frozen from
        # direct evaluation of the two square roots
        obs = make_observable(0.2, 0.6, (1, 0, 0))
        assert reversibility(obs) == pytest.approx(0.7841903733771223, abs=2e-15)

    def test_profile_is_on_unit_circle(self):
        prof = reversibility_profile(make_observable(0.1, 0.5, (1, 0, 0)))
        assert prof.reversibility**2 + prof.decoherence**2 == pytest.approx(1.0, abs=1e-12)


class TestDecoherence:
    @pytest.mark.parametrize(
        "bias,strength,expected",
        [(0.0, 1.0, 1.0), (0.0, 0.0, 0.0), (0.0, 0.6, 0.6)],
    )
    def test_values(self, bias, strength, expected):
        obs = make_observable(bias, strength, (0, 0, 1))
        assert decoherence(obs) == pytest.approx(expected, abs=1e-12)


class TestFromReversibilityAngle:
    def test_trivial_chart_point(self):
        assert from_reversibility_angle(1.0, 0.0) == pytest.approx((0.0, 0.0))

    def test_projective_chart_point(self):
        assert from_reversibility_angle(0.0, 0.0) == pytest.approx((1.0, 0.0))

    def test_generic_point(self):
        s, b = from_reversibility_angle(0.5, math.pi / 6)
        assert s == pytest.approx(0.75, abs=1e-15)
        assert b == pytest.approx(0.25, abs=1e-15)

    def test_angle_out_of_range(self):
        with pytest.raises(AngleOutOfRange):
            from_reversibility_angle(0.5, math.asin(0.5) + 1e-6)

    @given(st.floats(0.01, 1.0), st.floats(-0.99, 0.99))
    @settings(max_examples=300)
    def test_round_trip(self, r, frac):
        alpha = frac * math.asin(r)
        s, b = from_reversibility_angle(r, alpha)
        obs = make_observable(b, s, (0, 0, 1))
        assert reversibility(obs) == pytest.approx(r, abs=1e-10)

    @pytest.mark.parametrize("r", [1e-3, 0.1, 0.5, 0.75, 0.999, 1.0])
    @pytest.mark.parametrize("sign", [-1.0, 1.0])
    def test_round_trip_at_chart_boundary(self, r, sign):
        # |alpha| = arcsin(r) sits on the constraint boundary s + |b| = 1,
        # where the reversibility has a square-root branch: double precision
        # can only reproduce r to ~sqrt(eps) there
        s, b = from_reversibility_angle(r, sign * math.asin(r))
        obs = make_observable(b, s, (0, 0, 1))
        assert reversibility(obs) == pytest.approx(r, abs=5e-8)


class TestFidelityBound:
    def test_projective(self):
        assert fidelity_bound(projective((1, 0, 0))) == pytest.approx(2.0 / 3.0)

    def test_trivial(self):
        assert fidelity_bound(trivial(0.0)) == pytest.approx(1.0)

    def test_unbiased(self):
        assert fidelity_bound(unbiased(0.8, (1, 0, 0))) == pytest.approx(2.6 / 3.0)


class TestExpectation:
    def test_projective_aligned(self):
        assert expectation(projective((0, 0, 1)), (0, 0, 1)) == pytest.approx(1.0)

    def test_trivial_returns_bias(self):
        assert expectation(trivial(0.3), (0.2, -0.5, 0.1)) == pytest.approx(0.3)

    def test_generic(self):
        obs = make_observable(0.1, 0.5, (1, 0, 0))
        assert expectation(obs, (0.4, 0, 0)) == pytest.approx(0.3)

    def test_invalid_bloch(self):
        with pytest.raises(InvalidBloch):
            expectation(projective((0, 0, 1)), (1.1, 0, 0))


class TestTradeoffRelations:
    @given(valid_bias_strength())
    @settings(max_examples=500)
    def test_reversibility_chain(self, bs):
        b, s = bs
        r2 = reversibility(make_observable(b, s, (0, 0, 1))) ** 2
        assert 1.0 - s <= r2 + 1e-12
        assert r2 <= 1.0 - s * s + 1e-12

    @given(valid_bias_strength())
    @settings(max_examples=500)
    def test_bias_bounded_by_squared_reversibility(self, bs):
        b, s = bs
        assert abs(b) <= reversibility(make_observable(b, s, (0, 0, 1))) ** 2 + 1e-12

    @given(valid_bias_strength())
    @settings(max_examples=500)
    def test_complementary_lower_bound(self, bs):
        b, s = bs
        r = reversibility(make_observable(b, s, (0, 0, 1)))
        assert r * r + s * s >= 0.75 - 1e-12

    @given(valid_bias_strength())
    @settings(max_examples=500)
    def test_decoherence_sandwich(self, bs):
        b, s = bs
        d = decoherence(make_observable(b, s, (0, 0, 1)))
        assert d >= s - 1e-12
        assert s >= d * d - 1e-12

    @given(st.floats(0.0, 1.0))
    @settings(max_examples=300)
    def test_unbiased_equality(self, s):
        r = reversibility(unbiased(s, (0, 0, 1)))
        assert r * r + s * s == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(0.001, 0.999))
    @settings(max_examples=300)
    def test_simple_model_reversibility_is_suboptimal(self, s):
        r = reversibility(unbiased(s, (0, 0, 1)))
        assert 1.0 - s <= math.sqrt(1.0 - s) < r + 1e-15
        assert 1.0 - s < r
