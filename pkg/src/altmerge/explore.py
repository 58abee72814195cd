"""Leader action selection under an uncertain altruism coefficient.

The leader scores each row by its expected value under the current belief
plus an optional exploration bonus. Two bonuses are provided: expected
entropy reduction of the belief, and expected absolute change of the total
attainable leader value. Both are computed at decision time as expectations
over the follower responses the belief predicts. A conflict-aware variant
hedges the expected value against the chance that the opponent also
believes itself the leader.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .belief import (
    IntervalBelief,
    Partition,
    bayes_update,
    entropy,
    mass_below,
    partition_domain,
    response_per_cell,
)
from .game import (
    AltruismGame,
    Number,
    Player,
    altruistic_reward,
    follower_best_response,
    leader_preference_of_follower,
    leader_reward_given_alpha,
    line_crossing,
    stackelberg_equilibrium,
)


class StrategyKind(enum.Enum):
    PASSIVE = "passive"
    INFO_GAIN = "info-gain"
    REWARD_GAIN = "reward-gain"


@dataclass(frozen=True)
class ExplorationStrategy:
    """How the leader trades immediate value against learning.

    ``lam`` scales the exploration bonus (unused by PASSIVE). With
    ``positive_gain_only`` the value-change bonus counts only upside,
    instead of the default absolute change. ``conflict_aware`` switches
    the expected-value term to the conflict-hedged reward.
    """

    kind: StrategyKind
    lam: float = 1.0
    conflict_aware: bool = False
    positive_gain_only: bool = False

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("bonus scale must be nonnegative")


@dataclass(frozen=True)
class ActionEvaluation:
    """Decision-time quantities for one leader row."""

    action_index: int
    expected_reward: float
    bonus: float
    total: float
    outcome_probabilities: tuple[float, ...]


def expected_leader_reward(
    game: AltruismGame, belief: IntervalBelief, leader_action: int
) -> float:
    """Belief-weighted leader value of the row, follower responding rationally."""
    _require_refinement(game, belief)
    return sum(
        mass * float(leader_reward_given_alpha(game, leader_action, mid))
        for mass, mid in zip(belief.masses, belief.partition.midpoints)
    )


def predicted_outcome_distribution(
    game: AltruismGame, belief: IntervalBelief, leader_action: int
) -> tuple[float, ...]:
    """Probability of each follower response, summing cell masses by response."""
    responses = response_per_cell(belief, game, leader_action)
    probs = [0.0] * game.n_follower
    for mass, j in zip(belief.masses, responses):
        probs[j] += mass
    return tuple(probs)


def _posterior_for_outcome(
    game: AltruismGame, belief: IntervalBelief, leader_action: int, outcome: int
) -> IntervalBelief:
    one_hot = tuple(1.0 if j == outcome else 0.0 for j in range(game.n_follower))
    return bayes_update(belief, game, leader_action, one_hot)


def info_gain_bonus(game: AltruismGame, belief: IntervalBelief, leader_action: int) -> float:
    """Expected entropy drop of the belief after observing the response."""
    probs = predicted_outcome_distribution(game, belief, leader_action)
    expected_posterior_entropy = 0.0
    for j, p in enumerate(probs):
        if p <= 0:
            continue
        posterior = _posterior_for_outcome(game, belief, leader_action, j)
        expected_posterior_entropy += p * entropy(posterior)
    return entropy(belief) - expected_posterior_entropy


def attainable_value(game: AltruismGame, belief: IntervalBelief) -> float:
    """Sum over rows of the belief-weighted leader value."""
    return sum(expected_leader_reward(game, belief, i) for i in range(game.n_leader))


def expected_reward_gain_bonus(
    game: AltruismGame,
    belief: IntervalBelief,
    leader_action: int,
    positive_only: bool = False,
) -> float:
    """Expected change in total attainable leader value after the response.

    Uses the absolute change by default; ``positive_only`` counts upside only.
    """
    probs = predicted_outcome_distribution(game, belief, leader_action)
    base = attainable_value(game, belief)
    bonus = 0.0
    for j, p in enumerate(probs):
        if p <= 0:
            continue
        posterior = _posterior_for_outcome(game, belief, leader_action, j)
        change = attainable_value(game, posterior) - base
        bonus += p * (max(change, 0.0) if positive_only else abs(change))
    return bonus


def _require_refinement(game: AltruismGame, belief: IntervalBelief) -> None:
    if not belief.partition.refines(partition_domain(game)):
        raise ValueError("belief partition must refine the game's domain partition")


def leader_cell_reward(game: AltruismGame, i: int, j: int) -> Number:
    """Leader's (altruism-weighted) value of a specific cell."""
    return altruistic_reward(game, (i, j), Player.LEADER, game.alpha_leader)


def is_conflicted(game: AltruismGame, alpha: Number) -> bool:
    """True when role confusion at ``alpha`` breaks coordination.

    Compares the follower's rational response to the leader's equilibrium
    action with the action the follower would commit to as leader.
    """
    equilibrium = stackelberg_equilibrium(game, alpha)
    as_follower = follower_best_response(game, equilibrium.leader_index, alpha)
    as_leader = leader_preference_of_follower(game, alpha)
    return as_follower != as_leader


def _role_swap_points(game: AltruismGame) -> list[Number]:
    """Coefficients where any two cells' follower-altruistic values cross.

    Superset of every point where the follower-as-leader preference or its
    tie-breaking can change; used to bound conflict-region cells.
    """
    cells = [
        (game.rewards[i][j][1], game.rewards[i][j][0])
        for i in range(game.n_leader)
        for j in range(game.n_follower)
    ]
    points: list[Number] = []
    for a in range(len(cells)):
        for b in range(a + 1, len(cells)):
            alpha = line_crossing(cells[a][0], cells[a][1], cells[b][0], cells[b][1])
            if alpha is not None and 0 < alpha < 1:
                if not any(abs(float(alpha) - float(p)) <= 1e-12 for p in points):
                    points.append(alpha)
    return sorted(points, key=float)


def decision_partition(game: AltruismGame, conflict_aware: bool = False) -> Partition:
    """Partition on which every decision-time quantity is cellwise constant."""
    base = partition_domain(game)
    if not conflict_aware:
        return base
    return base.refined(tuple(_role_swap_points(game)))


def conflict_region(game: AltruismGame) -> tuple[tuple[Number, Number], ...]:
    """Maximal intervals of coefficients where role confusion breaks coordination.

    Cells between candidate breakpoints are classified at their midpoint;
    adjacent conflicted cells merge. Breakpoints are exact when the game is
    rational, so e.g. a region ending at 1/2 is reported exactly.
    """
    partition = decision_partition(game, conflict_aware=True)
    intervals: list[list[Number]] = []
    for (lo, hi), mid in zip(partition.cells, partition.midpoints):
        if not is_conflicted(game, mid):
            continue
        if intervals and intervals[-1][1] == lo:
            intervals[-1][1] = hi
        else:
            intervals.append([lo, hi])
    return tuple((lo, hi) for lo, hi in intervals)


def conflict_mass(game: AltruismGame, belief: IntervalBelief) -> float:
    """Belief probability of the conflict region."""
    return sum(
        mass_below(belief, hi) - mass_below(belief, lo)
        for lo, hi in conflict_region(game)
    )


def conflict_adjusted_reward(
    game: AltruismGame,
    belief: IntervalBelief,
    cell: tuple[int, int],
    alpha: Number,
) -> float:
    """Cell value hedged by the chance the follower acts as leader.

    Mixes the nominal cell with the cell reached if the follower plays its
    own leader preference at ``alpha``, weighted by the belief mass of the
    conflict region.
    """
    i, j = cell
    p = conflict_mass(game, belief)
    j_leader = leader_preference_of_follower(game, alpha)
    nominal = float(leader_cell_reward(game, i, j))
    conflicted = float(leader_cell_reward(game, i, j_leader))
    return (1 - p) * nominal + p * conflicted


def _conflict_aware_expected_reward(
    game: AltruismGame, belief: IntervalBelief, leader_action: int
) -> float:
    responses = response_per_cell(belief, game, leader_action)
    total = 0.0
    for mass, mid, j in zip(belief.masses, belief.partition.midpoints, responses):
        if mass <= 0:
            continue
        total += mass * conflict_adjusted_reward(game, belief, (leader_action, j), mid)
    return total


def evaluate_actions(
    game: AltruismGame, belief: IntervalBelief, strategy: ExplorationStrategy
) -> list[ActionEvaluation]:
    """Score every leader row under the strategy."""
    _require_refinement(game, belief)
    if strategy.conflict_aware and not belief.partition.refines(
        decision_partition(game, conflict_aware=True)
    ):
        raise ValueError("conflict-aware selection needs the role-swap breakpoints refined in")
    evaluations = []
    for i in range(game.n_leader):
        if strategy.conflict_aware:
            reward = _conflict_aware_expected_reward(game, belief, i)
        else:
            reward = expected_leader_reward(game, belief, i)
        if strategy.kind is StrategyKind.INFO_GAIN:
            bonus = info_gain_bonus(game, belief, i)
        elif strategy.kind is StrategyKind.REWARD_GAIN:
            bonus = expected_reward_gain_bonus(game, belief, i, strategy.positive_gain_only)
        else:
            bonus = 0.0
        evaluations.append(
            ActionEvaluation(
                action_index=i,
                expected_reward=reward,
                bonus=bonus,
                total=reward + strategy.lam * bonus,
                outcome_probabilities=predicted_outcome_distribution(game, belief, i),
            )
        )
    return evaluations


def select_action(
    game: AltruismGame, belief: IntervalBelief, strategy: ExplorationStrategy
) -> tuple[list[ActionEvaluation], int]:
    """Evaluations for all rows plus the argmax row (ties to lowest index)."""
    evaluations = evaluate_actions(game, belief, strategy)
    best = max(range(len(evaluations)), key=lambda i: (evaluations[i].total, -i))
    return evaluations, best
