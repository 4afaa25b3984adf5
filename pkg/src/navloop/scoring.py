"""Delayed reward computation and leaderboard semantics.

The reward for a trial that took t seconds and ended d meters from the goal is

    R = beta1 * exp(-alpha1 * t) + beta2 * exp(-alpha2 * d)

computed component-wise so both parts can be logged. The displayed score is
the reward scaled (by 300 in the demo constants), rounded half away from
zero, and floored at zero so participants never see a negative number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

from .settings import ScoreConstants

MAX_BOARD_ENTRIES = 10


class Reward(NamedTuple):
    total: float
    time_component: float
    distance_component: float


def raw_reward(t: float, d: float, constants: ScoreConstants) -> Reward:
    """Evaluate the reward for elapsed time t and residual distance d."""
    if not (math.isfinite(t) and math.isfinite(d)):
        raise ValueError(f"reward inputs must be finite, got t={t!r} d={d!r}")
    if t < 0 or d < 0:
        raise ValueError(f"reward inputs must be non-negative, got t={t!r} d={d!r}")
    time_component = constants.beta1 * math.exp(-constants.alpha1 * t)
    distance_component = constants.beta2 * math.exp(-constants.alpha2 * d)
    return Reward(time_component + distance_component, time_component, distance_component)


def round_half_away(value: float) -> int:
    """Round to the nearest integer, halves away from zero.

    Python's built-in round() goes to the nearest even integer on halves,
    which is not how scores are presented.
    """
    if value >= 0:
        return int(math.floor(value + 0.5))
    return int(math.ceil(value - 0.5))


def displayed_score(reward: float, constants: ScoreConstants) -> int:
    if not math.isfinite(reward):
        raise ValueError(f"reward must be finite, got {reward!r}")
    score = round_half_away(constants.scale_factor * reward)
    if constants.floor_at_zero and score < 0:
        return 0
    return score


class LeaderboardMode(Enum):
    REAL = "Real"
    FAKE = "Fake"
    PRACTICE = "Practice"


@dataclass(frozen=True)
class LeaderboardEntry:
    participant_id: str
    score: int
    timestamp: float  # seconds, informational only; ranking is by score


@dataclass(frozen=True)
class Placement:
    """Outcome of one submission, for display next to the board."""

    score: int
    rank: int | None          # 1-based position on the board, None when below it
    is_new_high: bool         # entered the board (highlighted in red on the console)
    below_board: bool         # shown at the bottom, under the tenth entry
    practice: bool = False    # provisional rank only, board untouched


@dataclass
class Leaderboard:
    """Top ten scores with real, fake, and practice behaviors.

    Real boards accumulate across participants and persist. A fake board
    reverts to its loaded snapshot for every new participant so everyone
    faces the same competition; the on-disk file is never rewritten in fake
    mode. Practice mode computes where a score would land without storing it.
    """

    mode: LeaderboardMode = LeaderboardMode.REAL
    entries: list[LeaderboardEntry] = field(default_factory=list)
    persisted_snapshot: tuple[LeaderboardEntry, ...] = ()

    def __post_init__(self) -> None:
        self.entries = sorted(self.entries, key=lambda e: -e.score)[:MAX_BOARD_ENTRIES]

    def _rank_for(self, score: int) -> int:
        # Stable on ties: an equal earlier score keeps the better rank.
        rank = 1
        for entry in self.entries:
            if entry.score >= score:
                rank += 1
        return rank

    def submit(self, participant_id: str, score: int, timestamp: float = 0.0) -> Placement:
        if score < 0:
            raise ValueError(f"leaderboard scores are non-negative, got {score}")
        rank = self._rank_for(score)
        if self.mode is LeaderboardMode.PRACTICE:
            on_board = rank <= MAX_BOARD_ENTRIES
            return Placement(
                score=score,
                rank=rank if on_board else None,
                is_new_high=False,
                below_board=not on_board,
                practice=True,
            )
        if rank > MAX_BOARD_ENTRIES:
            return Placement(score=score, rank=None, is_new_high=False, below_board=True)
        entry = LeaderboardEntry(participant_id, score, timestamp)
        self.entries.insert(rank - 1, entry)
        del self.entries[MAX_BOARD_ENTRIES:]
        return Placement(score=score, rank=rank, is_new_high=True, below_board=False)

    def reset_for_participant(self) -> None:
        """Drop in-session mutations; fake mode only."""
        if self.mode is not LeaderboardMode.FAKE:
            raise ValueError("reset_for_participant applies to fake boards only")
        self.entries = list(self.persisted_snapshot)

    def view(self) -> list[LeaderboardEntry]:
        return list(self.entries)

    def with_snapshot(self) -> Leaderboard:
        """Freeze the current entries as the revert point."""
        return replace(self, persisted_snapshot=tuple(self.entries))
