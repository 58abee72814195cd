"""Shared game fixtures used across the suite."""

import pytest

from altmerge.game import AltruismGame, OutcomeLabel, build_responsibility_matrix


def make_high_stakes_probe_game() -> AltruismGame:
    """3x2 game with a risky high-reward row, a probing row, and a safe row.

    The safe row pays the leader 2 regardless of the coefficient; the probe
    row's response flips at 1/3; the risky row's at 7/15.
    """
    return AltruismGame(
        leader_actions=("risky", "probe", "safe"),
        follower_actions=("first", "second"),
        rewards=(
            ((3, 0), (-5, 7)),
            ((-1, 2), (1, 1)),
            ((-1, 2), (2, 2)),
        ),
    )


def make_two_row_sufficiency_game() -> AltruismGame:
    """2x2 game whose rows split the domain at 5/12 and 5/6."""
    return AltruismGame(
        leader_actions=("high", "low"),
        follower_actions=("first", "second"),
        rewards=(
            ((5, -4), (-2, 1)),
            ((1, -4), (0, 1)),
        ),
    )


def make_lane_merge_game() -> AltruismGame:
    """Hand-valued lane-merge game: merge ahead / merge behind / probe."""
    return AltruismGame(
        leader_actions=("merge_ahead", "merge_behind", "probe"),
        follower_actions=("give_way", "stay_ahead"),
        rewards=(
            ((3, -2), (-10, 3)),
            ((0, -2), (1, 3)),
            ((2, 0), (-1, 3)),
        ),
    )


LANE_MERGE_LABELS = [
    [(OutcomeLabel.GOAL_ACHIEVED, OutcomeLabel.NEUTRAL),
     (OutcomeLabel.ACCIDENT_RESPONSIBLE, OutcomeLabel.ACCIDENT_RESPONSIBLE)],
    [(OutcomeLabel.ACCIDENT_RESPONSIBLE, OutcomeLabel.ACCIDENT_RESPONSIBLE),
     (OutcomeLabel.NEUTRAL, OutcomeLabel.GOAL_ACHIEVED)],
    [(OutcomeLabel.GOAL_ACHIEVED, OutcomeLabel.NEUTRAL),
     (OutcomeLabel.NEUTRAL, OutcomeLabel.GOAL_ACHIEVED)],
]


def make_responsibility_lane_game() -> AltruismGame:
    """Lane-merge game built from accident-responsibility labels."""
    return AltruismGame(
        leader_actions=("merge_ahead", "merge_behind", "probe"),
        follower_actions=("give_way", "stay_ahead"),
        rewards=build_responsibility_matrix(LANE_MERGE_LABELS),
    )


@pytest.fixture
def probe_game() -> AltruismGame:
    return make_high_stakes_probe_game()


@pytest.fixture
def sufficiency_game() -> AltruismGame:
    return make_two_row_sufficiency_game()


@pytest.fixture
def lane_merge_game() -> AltruismGame:
    return make_lane_merge_game()


@pytest.fixture
def responsibility_game() -> AltruismGame:
    return make_responsibility_lane_game()
