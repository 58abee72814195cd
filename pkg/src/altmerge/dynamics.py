"""Kinematic bicycle model and the six trajectory cost features.

States are (x, y, v, theta) with x lateral, y longitudinal, and theta = 0
pointing straight down the lane (+y). Features are evaluated on a state
pair (own vehicle, other vehicle) and combined linearly by per-game-cell
weight vectors; planners maximize the weighted sum.

Feature conventions: the lane-centre, speed, and heading terms are bounded
penalties 1 - exp(-k * err^2) in [0, 1), zero exactly on target. The
separation term is the squared offset in the other vehicle's frame,
normalized by the safety ellipse axes, minus 1, clamped at 0: -1 on top of
the other vehicle, relaxing to 0 on the ellipse boundary and beyond, so it
penalizes proximity without rewarding unbounded flight. The lead term is
tanh of the longitudinal gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

N_FEATURES = 6


@dataclass(frozen=True)
class VehicleState:
    """Planar vehicle state: lateral x, longitudinal y, speed, heading."""

    x: float
    y: float
    v: float
    theta: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "v", "theta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite state component {name}")
        if self.v < 0:
            raise ValueError("speed must be nonnegative")


@dataclass(frozen=True)
class Control:
    """One timestep of acceleration (m/s^2) and steering angle (rad)."""

    accel: float
    steer: float


@dataclass(frozen=True)
class BicycleParams:
    """Geometry and actuation limits of the kinematic bicycle."""

    wheelbase: float = 2.7
    accel_max: float = 3.0
    steer_max: float = 0.3

    def __post_init__(self) -> None:
        if self.wheelbase <= 0 or self.accel_max <= 0 or self.steer_max <= 0:
            raise ValueError("bicycle parameters must be positive")

    def check(self, control: Control) -> None:
        if abs(control.accel) > self.accel_max + 1e-12:
            raise ValueError(f"acceleration {control.accel} exceeds limit {self.accel_max}")
        if abs(control.steer) > self.steer_max + 1e-12:
            raise ValueError(f"steering {control.steer} exceeds limit {self.steer_max}")


@dataclass(frozen=True)
class FeatureParams:
    """Shape constants of the cost features.

    ``x_left`` and ``x_right`` are the two lane centres, ``lane_theta`` the
    lane heading. ``width_margin`` and ``length_margin`` pad the vehicle
    footprint into the safety-ellipse semi-axes (width + margin laterally,
    length + margin longitudinally).
    """

    lambda_x: float = 0.5
    lambda_theta: float = 2.0
    lambda_v: float = 0.25
    vehicle_width: float = 2.0
    vehicle_length: float = 4.5
    width_margin: float = 0.5
    length_margin: float = 2.0
    x_left: float = 2.5
    x_right: float = 7.5
    v_limit: float = 15.0
    lane_theta: float = 0.0

    def __post_init__(self) -> None:
        if self.vehicle_width <= 0 or self.vehicle_length <= 0:
            raise ValueError("vehicle dimensions must be positive")
        if self.vehicle_width + self.width_margin <= 0:
            raise ValueError("lateral ellipse axis must be positive")
        if self.vehicle_length + self.length_margin <= 0:
            raise ValueError("longitudinal ellipse axis must be positive")


def step(
    state: VehicleState, control: Control, params: BicycleParams, dt: float
) -> VehicleState:
    """Euler kinematic bicycle update; speed clamps at zero.

    The speed update applies before the position update (semi-implicit
    Euler), so acceleration is observable in a single step; the heading
    rate uses the pre-step speed.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    params.check(control)
    v = max(0.0, state.v + control.accel * dt)
    x = state.x + v * math.sin(state.theta) * dt
    y = state.y + v * math.cos(state.theta) * dt
    theta = state.theta + (state.v / params.wheelbase) * math.tan(control.steer) * dt
    return VehicleState(x, y, v, theta)


def _bounded_penalty(coefficient: float, error: float) -> float:
    return 1.0 - math.exp(-coefficient * error * error)


def features(
    state: VehicleState, other: VehicleState, params: FeatureParams
) -> tuple[float, float, float, float, float, float]:
    """Six-feature vector for the (own, other) state pair.

    0: left-lane-centre penalty, 1: right-lane-centre penalty,
    2: speed-limit penalty, 3: lane-heading penalty,
    4: safety-ellipse proximity penalty in the other vehicle's frame,
    5: longitudinal lead (tanh of the gap, positive when ahead).
    """
    phi0 = _bounded_penalty(params.lambda_x, state.x - params.x_left)
    phi1 = _bounded_penalty(params.lambda_x, state.x - params.x_right)
    phi2 = _bounded_penalty(params.lambda_v, state.v - params.v_limit)
    phi3 = _bounded_penalty(params.lambda_theta, state.theta - params.lane_theta)

    dx = state.x - other.x
    dy = state.y - other.y
    sin_o, cos_o = math.sin(other.theta), math.cos(other.theta)
    lateral = dx * cos_o - dy * sin_o
    longitudinal = dx * sin_o + dy * cos_o
    lat_axis = params.vehicle_width + params.width_margin
    lon_axis = params.vehicle_length + params.length_margin
    phi4 = min(0.0, (lateral / lat_axis) ** 2 + (longitudinal / lon_axis) ** 2 - 1.0)

    phi5 = math.tanh(state.y - other.y)
    return (phi0, phi1, phi2, phi3, phi4, phi5)


def weighted_features(
    state: VehicleState,
    other: VehicleState,
    weights: tuple[float, ...],
    params: FeatureParams,
) -> float:
    phi = features(state, other, params)
    return sum(w * f for w, f in zip(weights, phi))


def cost(
    trajectory: list[VehicleState],
    other_trajectory: list[VehicleState],
    weights: tuple[float, ...],
    params: FeatureParams,
) -> float:
    """Weighted feature sum over an aligned pair of state trajectories."""
    if len(trajectory) != len(other_trajectory):
        raise ValueError("trajectories must have equal length")
    if len(weights) != N_FEATURES:
        raise ValueError(f"expected {N_FEATURES} weights, got {len(weights)}")
    return sum(
        weighted_features(s, o, weights, params)
        for s, o in zip(trajectory, other_trajectory)
    )
