"""Bimatrix leader-follower games with altruism reweighting.

A game holds one reward pair per action cell. Each player blends its own
cell reward with the opponent's through an altruism coefficient in [0, 1]:
0 is fully selfish, 1 fully altruistic. The leader commits first; the
follower best-responds under its coefficient, breaking ties in the
leader's favour and then by lowest column index so runs are reproducible.

Reward crossings are solved in exact rational arithmetic whenever the
rewards are ints or Fractions, falling back to floats (deduplicated at
1e-9) otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

Number = int | float | Fraction

#: Dedup tolerance for reward-line crossings computed in floating point.
CROSSING_TOL = 1e-9


class Player(enum.Enum):
    """Role in the game: the row player leads, the column player follows."""

    LEADER = "leader"
    FOLLOWER = "follower"

    @property
    def other(self) -> "Player":
        return Player.FOLLOWER if self is Player.LEADER else Player.LEADER


class OutcomeLabel(enum.Enum):
    """Per-cell, per-player tag used to build responsibility rewards."""

    ACCIDENT_RESPONSIBLE = "accident_responsible"
    GOAL_ACHIEVED = "goal_achieved"
    NEUTRAL = "neutral"


#: Reward assigned to each outcome label.
RESPONSIBILITY_REWARDS = {
    OutcomeLabel.ACCIDENT_RESPONSIBLE: -1,
    OutcomeLabel.GOAL_ACHIEVED: 1,
    OutcomeLabel.NEUTRAL: 0,
}


@dataclass(frozen=True)
class AltruismGame:
    """Leader/follower bimatrix with one (leader, follower) reward pair per cell.

    ``rewards[i][j]`` is the raw pair received when the leader plays row i
    and the follower plays column j. ``alpha_leader`` is the leader's own
    altruism coefficient (0 by default: the leader values only its raw
    reward); the follower's coefficient is supplied per call because it is
    the unknown being inferred.
    """

    leader_actions: tuple[str, ...]
    follower_actions: tuple[str, ...]
    rewards: tuple[tuple[tuple[Number, Number], ...], ...]
    alpha_leader: Number = 0

    def __post_init__(self) -> None:
        if not self.leader_actions or not self.follower_actions:
            raise ValueError("game needs at least one action per player")
        object.__setattr__(self, "leader_actions", tuple(self.leader_actions))
        object.__setattr__(self, "follower_actions", tuple(self.follower_actions))
        rows = tuple(tuple(tuple(cell) for cell in row) for row in self.rewards)
        object.__setattr__(self, "rewards", rows)
        if len(rows) != len(self.leader_actions):
            raise ValueError("reward grid row count does not match leader actions")
        for row in rows:
            if len(row) != len(self.follower_actions):
                raise ValueError("reward grid column count does not match follower actions")
            for cell in row:
                if len(cell) != 2:
                    raise ValueError("every cell must hold exactly one reward pair")
        _check_alpha(self.alpha_leader)

    @property
    def n_leader(self) -> int:
        return len(self.leader_actions)

    @property
    def n_follower(self) -> int:
        return len(self.follower_actions)

    def cell(self, i: int, j: int) -> tuple[Number, Number]:
        if not (0 <= i < self.n_leader and 0 <= j < self.n_follower):
            raise ValueError(f"cell ({i}, {j}) out of bounds")
        return self.rewards[i][j]


@dataclass(frozen=True)
class Equilibrium:
    """Committed leader row, follower response, and the cell's raw rewards."""

    leader_index: int
    follower_index: int
    leader_reward: Number
    follower_reward: Number


def _check_alpha(alpha: Number) -> None:
    if not 0 <= alpha <= 1:
        raise ValueError(f"altruism coefficient must lie in [0, 1], got {alpha}")


def altruistic_reward(
    game: AltruismGame, cell: tuple[int, int], player: Player, alpha: Number
) -> Number:
    """Blend of own and opponent reward at ``cell``: (1-alpha)*own + alpha*other."""
    _check_alpha(alpha)
    r_leader, r_follower = game.cell(*cell)
    own, other = (r_leader, r_follower) if player is Player.LEADER else (r_follower, r_leader)
    return (1 - alpha) * own + alpha * other


def _leader_value(game: AltruismGame, i: int, j: int) -> Number:
    return altruistic_reward(game, (i, j), Player.LEADER, game.alpha_leader)


def follower_best_response(game: AltruismGame, leader_action: int, alpha: Number) -> int:
    """Follower's optimal column in the given row at coefficient ``alpha``.

    Ties go to the column the leader values most, remaining ties to the
    lowest column index.
    """
    _check_alpha(alpha)
    values = [
        altruistic_reward(game, (leader_action, j), Player.FOLLOWER, alpha)
        for j in range(game.n_follower)
    ]
    best = max(values)
    candidates = [j for j, v in enumerate(values) if v == best]
    if len(candidates) > 1:
        leader_best = max(_leader_value(game, leader_action, j) for j in candidates)
        candidates = [j for j in candidates if _leader_value(game, leader_action, j) == leader_best]
    return candidates[0]


def leader_reward_given_alpha(game: AltruismGame, leader_action: int, alpha: Number) -> Number:
    """Leader's value of the row once the follower responds at ``alpha``."""
    j = follower_best_response(game, leader_action, alpha)
    return _leader_value(game, leader_action, j)


def stackelberg_equilibrium(game: AltruismGame, alpha_follower: Number) -> Equilibrium:
    """Backward-induction equilibrium; leader ties break to the lowest row."""
    _check_alpha(alpha_follower)
    best_i = 0
    best_value = None
    for i in range(game.n_leader):
        value = leader_reward_given_alpha(game, i, alpha_follower)
        if best_value is None or value > best_value:
            best_i, best_value = i, value
    j = follower_best_response(game, best_i, alpha_follower)
    raw_leader, raw_follower = game.cell(best_i, j)
    return Equilibrium(best_i, j, raw_leader, raw_follower)


def line_crossing(
    own_j: Number, other_j: Number, own_k: Number, other_k: Number
) -> Number | None:
    """Coefficient where (1-a)*own_j + a*other_j meets (1-a)*own_k + a*other_k.

    Returns None for parallel or identical lines. Exact Fraction when all
    inputs are rational.
    """
    num = own_j - own_k
    den = (own_j - own_k) + (other_k - other_j)
    if den == 0:
        return None
    if all(isinstance(v, (int, Fraction)) for v in (own_j, other_j, own_k, other_k)):
        return Fraction(num, den)
    return num / den


def intersection_points(game: AltruismGame, leader_action: int) -> list[Number]:
    """Coefficients strictly inside (0, 1) where the row's best response can flip.

    Every crossing of two follower reward lines in the row is returned,
    deduplicated and sorted. Parallel lines contribute nothing.
    """
    points: list[Number] = []
    row = game.rewards[leader_action]
    for j in range(len(row)):
        for k in range(j + 1, len(row)):
            alpha = line_crossing(row[j][1], row[j][0], row[k][1], row[k][0])
            if alpha is None or not 0 < alpha < 1:
                continue
            if not any(abs(alpha - p) <= CROSSING_TOL for p in points):
                points.append(alpha)
    return sorted(points)


def build_responsibility_matrix(
    labels: list[list[tuple[OutcomeLabel, OutcomeLabel]]],
) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Map per-cell (leader, follower) outcome labels to trinary reward pairs.

    Responsibility for an accident scores -1, achieving the player's goal
    scores 1, anything else 0.
    """
    grid = []
    for row in labels:
        cells = []
        for leader_label, follower_label in row:
            cells.append(
                (RESPONSIBILITY_REWARDS[leader_label], RESPONSIBILITY_REWARDS[follower_label])
            )
        grid.append(tuple(cells))
    return tuple(grid)


def transpose(game: AltruismGame, alpha_leader: Number = 0) -> AltruismGame:
    """Role-swapped game: the column player leads with coefficient ``alpha_leader``."""
    rewards = tuple(
        tuple((game.rewards[i][j][1], game.rewards[i][j][0]) for i in range(game.n_leader))
        for j in range(game.n_follower)
    )
    return AltruismGame(game.follower_actions, game.leader_actions, rewards, alpha_leader)


def leader_preference_of_follower(game: AltruismGame, alpha_follower: Number) -> int:
    """Column the follower would commit to if it led at ``alpha_follower``.

    The original leader then best-responds with its own fixed coefficient.
    """
    swapped = transpose(game, alpha_leader=alpha_follower)
    return stackelberg_equilibrium(swapped, alpha_follower=game.alpha_leader).leader_index
