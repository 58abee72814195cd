"""Bi-level trajectory planning over a short receding horizon.

The leader picks its control sequence anticipating that the follower will
best-respond to it; the follower's inner problem is re-solved for every
leader candidate. Controls are parameterized as constant (accel, steer)
per horizon half, searched by cyclic coordinate descent on a 5-point grid
that shrinks over three rounds. The scheme is derivative-free, fully
deterministic, and stops refining a coordinate once the objective improves
by less than SOLVER_TOL.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import (
    BicycleParams,
    Control,
    FeatureParams,
    VehicleState,
    cost,
    step,
)

#: Objective improvements below this do not move the search.
SOLVER_TOL = 1e-6

#: Grid-shrink rounds of the coordinate search.
SEARCH_ROUNDS = 3


@dataclass(frozen=True)
class PlanRequest:
    """Inputs of one bi-level planning problem."""

    leader_state: VehicleState
    follower_state: VehicleState
    leader_weights: tuple[float, ...]
    follower_weights: tuple[float, ...]
    horizon: int = 6
    dt: float = 0.2
    feature_params: FeatureParams = FeatureParams()
    bicycle_params: BicycleParams = BicycleParams()
    seed: int = 0  # reserved; the search is deterministic

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be at least one step")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if len(self.leader_weights) != 6 or len(self.follower_weights) != 6:
            raise ValueError("weight vectors must have six entries")


@dataclass(frozen=True)
class Plan:
    """Solved control sequences with their rolled-out trajectories."""

    leader_controls: tuple[Control, ...]
    follower_controls: tuple[Control, ...]
    leader_trajectory: tuple[VehicleState, ...]
    follower_trajectory: tuple[VehicleState, ...]
    leader_cost: float


def _expand(params: tuple[float, float, float, float], horizon: int) -> tuple[Control, ...]:
    """Constant controls per horizon half: (accel1, steer1, accel2, steer2)."""
    first = (horizon + 1) // 2
    a1, s1, a2, s2 = params
    return tuple(
        Control(a1, s1) if k < first else Control(a2, s2) for k in range(horizon)
    )


def rollout(
    state: VehicleState,
    controls: tuple[Control, ...],
    params: BicycleParams,
    dt: float,
) -> tuple[VehicleState, ...]:
    """Post-step states produced by applying the controls in order."""
    states = []
    current = state
    for control in controls:
        current = step(current, control, params, dt)
        states.append(current)
    return tuple(states)


def _candidate_values(center: float, span: float, limit: float) -> list[float]:
    raw = (center - span, center - span / 2, center, center + span / 2, center + span)
    values: list[float] = []
    for v in raw:
        clamped = max(-limit, min(limit, v))
        if not any(abs(clamped - u) < 1e-12 for u in values):
            values.append(clamped)
    return values


def _coordinate_search(objective, params: BicycleParams) -> tuple[tuple[float, ...], float]:
    """Shrinking-grid cyclic coordinate descent from the zero-control start.

    ``objective`` maps a 4-tuple (accel1, steer1, accel2, steer2) to the
    value being maximized. Only strict improvements above SOLVER_TOL move
    the iterate, so flat objectives keep the zero initialization.
    """
    limits = (params.accel_max, params.steer_max, params.accel_max, params.steer_max)
    current = [0.0, 0.0, 0.0, 0.0]
    best = objective(tuple(current))
    spans = list(limits)
    for _ in range(SEARCH_ROUNDS):
        for coord in range(4):
            for value in _candidate_values(current[coord], spans[coord], limits[coord]):
                if abs(value - current[coord]) < 1e-12:
                    continue
                candidate = list(current)
                candidate[coord] = value
                score = objective(tuple(candidate))
                if score > best + SOLVER_TOL:
                    best = score
                    current = candidate
        spans = [s / 2 for s in spans]
    return tuple(current), best


def follower_plan(
    follower_state: VehicleState,
    leader_state: VehicleState,
    leader_controls: tuple[Control, ...],
    follower_weights: tuple[float, ...],
    dt: float = 0.2,
    feature_params: FeatureParams = FeatureParams(),
    bicycle_params: BicycleParams = BicycleParams(),
) -> tuple[Control, ...]:
    """Follower controls maximizing its weighted features against a fixed leader plan."""
    if len(follower_weights) != 6:
        raise ValueError("weight vectors must have six entries")
    if not leader_controls:
        raise ValueError("leader control sequence must be nonempty")
    leader_traj = rollout(leader_state, leader_controls, bicycle_params, dt)
    horizon = len(leader_controls)

    def objective(params4: tuple[float, ...]) -> float:
        controls = _expand(params4, horizon)
        follower_traj = rollout(follower_state, controls, bicycle_params, dt)
        return cost(list(follower_traj), list(leader_traj), follower_weights, feature_params)

    params4, _ = _coordinate_search(objective, bicycle_params)
    return _expand(params4, horizon)


def _leader_value(
    request: PlanRequest, leader_params: tuple[float, ...]
) -> tuple[float, tuple[Control, ...], tuple[Control, ...]]:
    leader_controls = _expand(leader_params, request.horizon)
    follower_controls = follower_plan(
        request.follower_state,
        request.leader_state,
        leader_controls,
        request.follower_weights,
        request.dt,
        request.feature_params,
        request.bicycle_params,
    )
    leader_traj = rollout(request.leader_state, leader_controls, request.bicycle_params, request.dt)
    follower_traj = rollout(
        request.follower_state, follower_controls, request.bicycle_params, request.dt
    )
    value = cost(
        list(leader_traj), list(follower_traj), request.leader_weights, request.feature_params
    )
    return value, leader_controls, follower_controls


def leader_objective(request: PlanRequest, leader_params: tuple[float, ...]) -> float:
    """Leader value of a candidate parameterization, follower best-responding."""
    return _leader_value(request, leader_params)[0]


def bilevel_plan(request: PlanRequest) -> Plan:
    """Nested optimization: leader search with a fresh follower solve per candidate."""
    params4, _ = _coordinate_search(
        lambda p: leader_objective(request, p), request.bicycle_params
    )
    value, leader_controls, follower_controls = _leader_value(request, params4)
    leader_traj = rollout(request.leader_state, leader_controls, request.bicycle_params, request.dt)
    follower_traj = rollout(
        request.follower_state, follower_controls, request.bicycle_params, request.dt
    )
    return Plan(leader_controls, follower_controls, leader_traj, follower_traj, value)


def mpc_step(
    leader_state: VehicleState,
    follower_state: VehicleState,
    leader_weights: tuple[float, ...],
    follower_weights: tuple[float, ...],
    horizon: int = 6,
    dt: float = 0.2,
    feature_params: FeatureParams = FeatureParams(),
    bicycle_params: BicycleParams = BicycleParams(),
) -> tuple[Control, Control, Plan]:
    """Plan the full horizon for the active cell, return only the first controls.

    The returned plan always spans ``horizon`` steps regardless of how much
    episode remains; callers re-plan every timestep.
    """
    request = PlanRequest(
        leader_state=leader_state,
        follower_state=follower_state,
        leader_weights=tuple(leader_weights),
        follower_weights=tuple(follower_weights),
        horizon=horizon,
        dt=dt,
        feature_params=feature_params,
        bicycle_params=bicycle_params,
    )
    plan = bilevel_plan(request)
    return plan.leader_controls[0], plan.follower_controls[0], plan
