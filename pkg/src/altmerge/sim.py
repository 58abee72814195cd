"""Closed-loop two-vehicle lane-merge episodes.

Each step the leader picks a game action from its current belief, plans a
trajectory for the matching cell with the bi-level planner, and executes
one control. The simulated follower holds a hidden altruism coefficient:
it picks its game response to the leader's action at that coefficient,
best-responds to the leader's published plan with the weight vector of the
realized cell, and executes one control. The leader then scores the
follower's observed control under every column's weight vector (softmax)
and Bayes-updates its belief.

Scenario files are JSON documents; see scenarios/schema.json for the
layout and scenarios/*.json for the shipped defaults.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .belief import BeliefContradictionError, IntervalBelief, bayes_update
from .dynamics import (
    BicycleParams,
    Control,
    FeatureParams,
    N_FEATURES,
    VehicleState,
    features,
    step,
)
from .explore import (
    ActionEvaluation,
    ExplorationStrategy,
    StrategyKind,
    decision_partition,
    select_action,
)
from .game import AltruismGame, build_responsibility_matrix, follower_best_response, leader_preference_of_follower, OutcomeLabel
from .planner import PlanRequest, bilevel_plan, follower_plan

#: The follower plays the rational response to the leader's action.
FOLLOWER_MODE_FOLLOWER = "follower"
#: The follower acts as if it were the leader (conflicted opponent).
FOLLOWER_MODE_LEADER = "leader"

WeightTable = dict[tuple[int, int], tuple[tuple[float, ...], tuple[float, ...]]]


class ScenarioError(ValueError):
    """A scenario document is missing fields or holds invalid values."""


@dataclass(frozen=True)
class Scenario:
    """Everything one closed-loop episode needs."""

    name: str
    game: AltruismGame
    weights: WeightTable
    leader_start: VehicleState
    follower_start: VehicleState
    true_alpha: float
    strategy: ExplorationStrategy
    episode_steps: int = 30
    dt: float = 0.2
    horizon: int = 6
    observation_temperature: float = 1.0
    follower_mode: str = FOLLOWER_MODE_FOLLOWER
    feature_params: FeatureParams = FeatureParams()
    bicycle_params: BicycleParams = BicycleParams()
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.true_alpha <= 1:
            raise ScenarioError(f"true_alpha must lie in [0, 1], got {self.true_alpha}")
        if self.episode_steps < 1:
            raise ScenarioError("episode_steps must be at least 1")
        if self.dt <= 0 or self.horizon < 1:
            raise ScenarioError("dt must be positive and horizon at least 1")
        if self.observation_temperature <= 0:
            raise ScenarioError("observation_temperature must be positive")
        if self.follower_mode not in (FOLLOWER_MODE_FOLLOWER, FOLLOWER_MODE_LEADER):
            raise ScenarioError(f"unknown follower_mode {self.follower_mode!r}")
        for i in range(self.game.n_leader):
            for j in range(self.game.n_follower):
                if (i, j) not in self.weights:
                    raise ScenarioError(f"weight table misses cell ({i}, {j})")
                pair = self.weights[(i, j)]
                if len(pair) != 2 or any(len(w) != N_FEATURES for w in pair):
                    raise ScenarioError(f"cell ({i}, {j}) needs two 6-entry weight vectors")


@dataclass(frozen=True)
class StepRecord:
    """One executed simulation step."""

    step: int
    chosen_cell: tuple[int, int]
    follower_action: int
    leader_control: Control
    follower_control: Control
    leader_state: VehicleState
    follower_state: VehicleState
    belief_breakpoints: tuple[float, ...]
    belief_masses: tuple[float, ...]
    evaluations: tuple[ActionEvaluation, ...]
    likelihoods: tuple[float, ...]
    warning: str | None = None


@dataclass(frozen=True)
class EpisodeSummary:
    """Outcome classification and audit trail of an episode."""

    outcome: str
    final_relative_position: float
    final_belief_support: tuple[float, float]
    chosen_cells: tuple[tuple[int, int], ...]
    warnings: int
    steps: int
    true_alpha: float
    strategy_kind: str
    conflict_aware: bool


@dataclass(frozen=True)
class EpisodeResult:
    records: tuple[StepRecord, ...]
    summary: EpisodeSummary


def observation_likelihoods(
    game: AltruismGame,
    leader_action: int,
    observed_control: Control,
    follower_state: VehicleState,
    leader_state_next: VehicleState,
    weights: WeightTable,
    feature_params: FeatureParams,
    bicycle_params: BicycleParams,
    dt: float,
    temperature: float = 1.0,
) -> tuple[float, ...]:
    """Softmax over follower actions scoring the observed one-step behaviour.

    The observed control is applied to the follower's state; the successor,
    paired with the leader's realized state, is scored under each column's
    follower weight vector. Equal weight vectors give uniform likelihoods;
    adding a constant to all scores changes nothing.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    successor = step(follower_state, observed_control, bicycle_params, dt)
    phi = features(successor, leader_state_next, feature_params)
    logits = []
    for j in range(game.n_follower):
        column_weights = weights[(leader_action, j)][1]
        logits.append(sum(w * f for w, f in zip(column_weights, phi)) / temperature)
    peak = max(logits)
    unnormalized = [math.exp(l - peak) for l in logits]
    total = sum(unnormalized)
    return tuple(u / total for u in unnormalized)


def _predicted_response(evaluation: ActionEvaluation) -> int:
    probs = evaluation.outcome_probabilities
    return max(range(len(probs)), key=lambda j: (probs[j], -j))


def _true_response(scenario: Scenario, leader_action: int) -> int:
    if scenario.follower_mode == FOLLOWER_MODE_LEADER:
        return leader_preference_of_follower(scenario.game, scenario.true_alpha)
    return follower_best_response(scenario.game, leader_action, scenario.true_alpha)


def run_episode(scenario: Scenario) -> EpisodeResult:
    """Simulate one closed-loop episode of ``scenario.episode_steps`` steps."""
    game = scenario.game
    partition = decision_partition(game, scenario.strategy.conflict_aware)
    belief = IntervalBelief.uniform(partition)
    leader_state = scenario.leader_start
    follower_state = scenario.follower_start
    records: list[StepRecord] = []
    warnings = 0

    for t in range(scenario.episode_steps):
        evaluations, leader_action = select_action(game, belief, scenario.strategy)
        predicted = _predicted_response(evaluations[leader_action])
        leader_w, follower_w_pred = scenario.weights[(leader_action, predicted)]
        plan = bilevel_plan(
            PlanRequest(
                leader_state=leader_state,
                follower_state=follower_state,
                leader_weights=leader_w,
                follower_weights=follower_w_pred,
                horizon=scenario.horizon,
                dt=scenario.dt,
                feature_params=scenario.feature_params,
                bicycle_params=scenario.bicycle_params,
                seed=scenario.seed,
            )
        )
        leader_control = plan.leader_controls[0]

        true_action = _true_response(scenario, leader_action)
        follower_w_true = scenario.weights[(leader_action, true_action)][1]
        follower_controls = follower_plan(
            follower_state,
            leader_state,
            plan.leader_controls,
            follower_w_true,
            scenario.dt,
            scenario.feature_params,
            scenario.bicycle_params,
        )
        follower_control = follower_controls[0]

        next_leader = step(leader_state, leader_control, scenario.bicycle_params, scenario.dt)
        next_follower = step(follower_state, follower_control, scenario.bicycle_params, scenario.dt)

        likelihoods = observation_likelihoods(
            game,
            leader_action,
            follower_control,
            follower_state,
            next_leader,
            scenario.weights,
            scenario.feature_params,
            scenario.bicycle_params,
            scenario.dt,
            scenario.observation_temperature,
        )
        warning = None
        try:
            belief = bayes_update(belief, game, leader_action, likelihoods)
        except BeliefContradictionError as error:
            belief = IntervalBelief.uniform(partition)
            warning = f"belief reset to uniform: {error}"
            warnings += 1

        records.append(
            StepRecord(
                step=t,
                chosen_cell=(leader_action, predicted),
                follower_action=true_action,
                leader_control=leader_control,
                follower_control=follower_control,
                leader_state=next_leader,
                follower_state=next_follower,
                belief_breakpoints=tuple(float(p) for p in belief.partition.breakpoints),
                belief_masses=belief.masses,
                evaluations=tuple(evaluations),
                likelihoods=likelihoods,
                warning=warning,
            )
        )
        leader_state, follower_state = next_leader, next_follower

    relative = leader_state.y - follower_state.y
    support = belief.support
    summary = EpisodeSummary(
        outcome="ahead" if relative > 0 else "behind",
        final_relative_position=relative,
        final_belief_support=(float(support[0]), float(support[1])),
        chosen_cells=tuple(r.chosen_cell for r in records),
        warnings=warnings,
        steps=len(records),
        true_alpha=float(scenario.true_alpha),
        strategy_kind=scenario.strategy.kind.value,
        conflict_aware=scenario.strategy.conflict_aware,
    )
    return EpisodeResult(tuple(records), summary)


def run_conflict_experiment(scenario: Scenario) -> dict[str, EpisodeResult]:
    """Run the scenario with conflict awareness off and on, same everything else."""
    unaware = dataclasses.replace(
        scenario, strategy=dataclasses.replace(scenario.strategy, conflict_aware=False)
    )
    aware = dataclasses.replace(
        scenario, strategy=dataclasses.replace(scenario.strategy, conflict_aware=True)
    )
    return {"unaware": run_episode(unaware), "aware": run_episode(aware)}


# ---------------------------------------------------------------------------
# Scenario documents


def _require(data: dict, key: str, context: str):
    if key not in data:
        raise ScenarioError(f"{context}: missing required key '{key}'")
    return data[key]


def _weight_vector(raw, context: str) -> tuple[float, ...]:
    if not isinstance(raw, list) or len(raw) != N_FEATURES:
        raise ScenarioError(f"{context}: expected a list of {N_FEATURES} numbers")
    return tuple(float(v) for v in raw)


_LABELS = {label.value: label for label in OutcomeLabel}


def _parse_game(data: dict, context: str) -> AltruismGame:
    leader_actions = tuple(_require(data, "leader_actions", context))
    follower_actions = tuple(_require(data, "follower_actions", context))
    if "rewards" in data and "outcome_labels" in data:
        raise ScenarioError(f"{context}: give either 'rewards' or 'outcome_labels', not both")
    if "rewards" in data:
        rewards = tuple(
            tuple((cell[0], cell[1]) for cell in row) for row in data["rewards"]
        )
    elif "outcome_labels" in data:
        try:
            labels = [
                [(_LABELS[leader], _LABELS[follower]) for leader, follower in row]
                for row in data["outcome_labels"]
            ]
        except KeyError as bad:
            raise ScenarioError(
                f"{context}: unknown outcome label {bad}; expected one of {sorted(_LABELS)}"
            ) from None
        rewards = build_responsibility_matrix(labels)
    else:
        raise ScenarioError(f"{context}: needs 'rewards' or 'outcome_labels'")
    try:
        return AltruismGame(
            leader_actions, follower_actions, rewards, data.get("alpha_leader", 0)
        )
    except ValueError as error:
        raise ScenarioError(f"{context}: {error}") from None


def _parse_state(data: dict, context: str) -> VehicleState:
    try:
        return VehicleState(
            float(_require(data, "x", context)),
            float(_require(data, "y", context)),
            float(_require(data, "v", context)),
            float(_require(data, "theta", context)),
        )
    except ValueError as error:
        raise ScenarioError(f"{context}: {error}") from None


def _parse_strategy(data: dict, context: str) -> ExplorationStrategy:
    kind_raw = _require(data, "kind", context)
    try:
        kind = StrategyKind(kind_raw)
    except ValueError:
        raise ScenarioError(
            f"{context}: unknown strategy kind {kind_raw!r}; "
            f"expected one of {[k.value for k in StrategyKind]}"
        ) from None
    try:
        return ExplorationStrategy(
            kind=kind,
            lam=float(data.get("lambda", 1.0)),
            conflict_aware=bool(data.get("conflict_aware", False)),
            positive_gain_only=bool(data.get("positive_gain_only", False)),
        )
    except ValueError as error:
        raise ScenarioError(f"{context}: {error}") from None


def parse_scenario(data: dict, source: str = "<scenario>") -> Scenario:
    """Build a Scenario from a parsed JSON document, with pointed errors."""
    game = _parse_game(_require(data, "game", source), f"{source}: game")
    ctx = f"{source}: weights"
    weights_raw = _require(data, "weights", source)
    weights: WeightTable = {}
    for i, leader_label in enumerate(game.leader_actions):
        row = weights_raw.get(leader_label)
        if row is None:
            raise ScenarioError(f"{ctx}: missing leader action '{leader_label}'")
        for j, follower_label in enumerate(game.follower_actions):
            cell = row.get(follower_label)
            if cell is None:
                raise ScenarioError(
                    f"{ctx}['{leader_label}']: missing follower action '{follower_label}'"
                )
            weights[(i, j)] = (
                _weight_vector(cell.get("leader"), f"{ctx}['{leader_label}']['{follower_label}'].leader"),
                _weight_vector(cell.get("follower"), f"{ctx}['{leader_label}']['{follower_label}'].follower"),
            )
    try:
        feature_params = FeatureParams(**data.get("feature_params", {}))
    except (TypeError, ValueError) as error:
        raise ScenarioError(f"{source}: feature_params: {error}") from None
    try:
        bicycle_params = BicycleParams(**data.get("vehicle", {}))
    except (TypeError, ValueError) as error:
        raise ScenarioError(f"{source}: vehicle: {error}") from None
    states = _require(data, "initial_states", source)
    try:
        return Scenario(
            name=str(data.get("name", Path(source).stem)),
            game=game,
            weights=weights,
            leader_start=_parse_state(_require(states, "leader", f"{source}: initial_states"),
                                      f"{source}: initial_states.leader"),
            follower_start=_parse_state(_require(states, "follower", f"{source}: initial_states"),
                                        f"{source}: initial_states.follower"),
            true_alpha=float(_require(data, "true_alpha", source)),
            strategy=_parse_strategy(_require(data, "strategy", source), f"{source}: strategy"),
            episode_steps=int(data.get("episode_steps", 30)),
            dt=float(data.get("dt", 0.2)),
            horizon=int(data.get("horizon_steps", 6)),
            observation_temperature=float(data.get("observation_temperature", 1.0)),
            follower_mode=str(data.get("follower_mode", FOLLOWER_MODE_FOLLOWER)),
            feature_params=feature_params,
            bicycle_params=bicycle_params,
        )
    except TypeError as error:
        raise ScenarioError(f"{source}: {error}") from None


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as error:
        raise ScenarioError(f"{path}: {error}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ScenarioError(
            f"{path}:{error.lineno}:{error.colno}: invalid JSON: {error.msg}"
        ) from None
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    return parse_scenario(data, str(path))
