"""Vehicle model and feature behaviour."""

import math
import random

import pytest

from altmerge.dynamics import (
    BicycleParams,
    Control,
    FeatureParams,
    VehicleState,
    cost,
    features,
    step,
)

BP = BicycleParams()
FP = FeatureParams()


class TestStep:
    def test_straight_line_motion(self):
        state = VehicleState(x=2.5, y=0.0, v=10.0, theta=0.0)
        nxt = step(state, Control(0.0, 0.0), BP, dt=0.2)
        assert nxt.y == pytest.approx(2.0)
        assert (nxt.x, nxt.v, nxt.theta) == (state.x, state.v, state.theta)

    def test_euler_velocity_update(self):
        state = VehicleState(0.0, 0.0, 10.0, 0.0)
        nxt = step(state, Control(1.0, 0.0), BP, dt=0.2)
        assert nxt.v == pytest.approx(10.2)

    def test_heading_rate_matches_model(self):
        state = VehicleState(0.0, 0.0, 8.0, 0.1)
        steer = 0.2
        nxt = step(state, Control(0.0, steer), BP, dt=0.2)
        assert abs(nxt.theta - state.theta) == pytest.approx(
            (state.v / BP.wheelbase) * math.tan(steer) * 0.2, abs=1e-12
        )

    def test_speed_clamps_at_zero(self):
        state = VehicleState(0.0, 0.0, 0.3, 0.0)
        nxt = step(state, Control(-3.0, 0.0), BP, dt=0.2)
        assert nxt.v == 0.0

    def test_zero_controls_conserve_speed_and_heading(self):
        rng = random.Random(1)
        for _ in range(50):
            state = VehicleState(
                rng.uniform(0, 10), rng.uniform(-5, 5), rng.uniform(0, 15), rng.uniform(-0.4, 0.4)
            )
            nxt = step(state, Control(0.0, 0.0), BP, dt=0.2)
            assert nxt.v == state.v
            assert nxt.theta == state.theta

    def test_rejects_out_of_limit_controls(self):
        state = VehicleState(0.0, 0.0, 5.0, 0.0)
        with pytest.raises(ValueError):
            step(state, Control(10.0, 0.0), BP, dt=0.2)
        with pytest.raises(ValueError):
            step(state, Control(0.0, 1.0), BP, dt=0.2)
        with pytest.raises(ValueError):
            step(state, Control(0.0, 0.0), BP, dt=0.0)


class TestFeatures:
    def test_zero_at_targets(self):
        own = VehicleState(x=FP.x_left, y=0.0, v=FP.v_limit, theta=FP.lane_theta)
        other = VehicleState(x=FP.x_right, y=0.0, v=10.0, theta=0.0)
        phi = features(own, other, FP)
        assert phi[0] == pytest.approx(0.0)
        assert phi[2] == pytest.approx(0.0)
        assert phi[3] == pytest.approx(0.0)
        assert phi[5] == pytest.approx(0.0)  # same longitudinal position

    def test_bounded_penalties_stay_in_unit_range(self):
        rng = random.Random(2)
        for _ in range(200):
            y = rng.uniform(-50, 50)
            own = VehicleState(rng.uniform(-5, 15), y + rng.uniform(-8, 8), rng.uniform(0, 30), rng.uniform(-1, 1))
            other = VehicleState(rng.uniform(-5, 15), y, rng.uniform(0, 30), rng.uniform(-1, 1))
            phi = features(own, other, FP)
            for k in range(4):
                assert 0.0 <= phi[k] <= 1.0  # saturates to 1.0 in float64
            assert -1.0 < phi[5] < 1.0

    def test_lead_feature_antisymmetric(self):
        a = VehicleState(2.5, 4.0, 10.0, 0.0)
        b = VehicleState(7.5, 1.0, 10.0, 0.0)
        assert features(a, b, FP)[5] == pytest.approx(-features(b, a, FP)[5])

    def test_separation_is_minus_one_at_zero_offset(self):
        own = VehicleState(3.0, 5.0, 10.0, 0.2)
        other = VehicleState(3.0, 5.0, 8.0, 0.4)
        assert features(own, other, FP)[4] == pytest.approx(-1.0)

    def test_separation_symmetric_under_frame_reflection(self):
        other = VehicleState(5.0, 0.0, 10.0, 0.3)
        sin_o, cos_o = math.sin(other.theta), math.cos(other.theta)

        def state_at(lateral, longitudinal):
            return VehicleState(
                other.x + lateral * cos_o + longitudinal * sin_o,
                other.y - lateral * sin_o + longitudinal * cos_o,
                10.0,
                0.0,
            )

        for lat, lon in [(1.0, 2.0), (0.5, -3.0), (2.0, 0.0)]:
            base = features(state_at(lat, lon), other, FP)[4]
            assert features(state_at(-lat, lon), other, FP)[4] == pytest.approx(base)
            assert features(state_at(lat, -lon), other, FP)[4] == pytest.approx(base)

    def test_separation_penalty_relaxes_with_distance(self):
        other = VehicleState(5.0, 0.0, 10.0, 0.0)
        values = [
            features(VehicleState(5.0, 0.0 + gap, 10.0, 0.0), other, FP)[4]
            for gap in (0.0, 1.0, 3.0, 6.0, 12.0)
        ]
        assert values[0] == pytest.approx(-1.0)
        assert values == sorted(values)


class TestCost:
    def _trajectories(self, n=6, gap=10.0):
        own = [VehicleState(2.5, gap + 2.0 * k, 10.0, 0.0) for k in range(n)]
        other = [VehicleState(7.5, 2.0 * k, 10.0, 0.0) for k in range(n)]
        return own, other

    def test_zero_weights_cost_nothing(self):
        own, other = self._trajectories()
        assert cost(own, other, (0.0,) * 6, FP) == 0.0

    def test_lead_only_weight_accumulates_tanh(self):
        own, other = self._trajectories(n=6, gap=10.0)
        value = cost(own, other, (0, 0, 0, 0, 0, 1.0), FP)
        assert value == pytest.approx(6 * math.tanh(10.0), abs=1e-6)

    def test_cost_is_linear_in_weights(self):
        own, other = self._trajectories()
        w = (0.3, -1.0, 0.5, -0.2, 0.1, 2.0)
        doubled = tuple(2 * x for x in w)
        assert cost(own, other, doubled, FP) == pytest.approx(2 * cost(own, other, w, FP))

    def test_length_mismatch_is_an_error(self):
        own, other = self._trajectories()
        with pytest.raises(ValueError):
            cost(own[:-1], other, (0.0,) * 6, FP)

    def test_wrong_weight_count_is_an_error(self):
        own, other = self._trajectories()
        with pytest.raises(ValueError):
            cost(own, other, (0.0,) * 5, FP)
