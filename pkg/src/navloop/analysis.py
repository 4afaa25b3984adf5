"""Descriptive analysis over session archives.

The pipeline mirrors how the experiment's results are prepared: collect per
trial measures (elapsed time, residual distance, score), exclude skipped
trials, accidental button presses, and bad sessions, then drop outliers
more than three sample standard deviations from each participant's mean
within each block, independently per measure. What remains is summarized
as mean (sd) per group and block, and movement logs are resampled into
residual-distance time courses on a fixed grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import Vec3, horizontal_distance
from .engine import EndReason, FrameLogEntry
from .persistence import SessionArchive, list_session_dirs, read_session_archive

MEASURES = ("t", "d", "score")

EXCLUDE_SKIPPED = "Skipped"
EXCLUDE_ACCIDENTAL = "AccidentalEnd"
EXCLUDE_BAD_SESSION = "BadSession"

DEFAULT_MIN_TRIAL_DURATION = 0.5  # seconds; anything shorter counts as accidental
DEFAULT_GRID = (0.0, 30.0, 0.1)


@dataclass(frozen=True)
class TrialAggregate:
    participant_id: str
    group: str
    block: int
    trial: int
    t: float
    d: float
    score: int
    end_reason: str
    excluded: str | None = None  # Skipped / AccidentalEnd / BadSession
    outliers: frozenset[str] = frozenset()  # measures on which the trial is an outlier

    def measure(self, name: str) -> float:
        if name == "t":
            return self.t
        if name == "d":
            return self.d
        if name == "score":
            return float(self.score)
        raise ValueError(f"unknown measure '{name}'")

    def included_for(self, name: str) -> bool:
        return self.excluded is None and name not in self.outliers


def collect_aggregates(
    archives: Iterable[SessionArchive],
    min_trial_duration: float = DEFAULT_MIN_TRIAL_DURATION,
) -> list[TrialAggregate]:
    rows: list[TrialAggregate] = []
    for archive in archives:
        for result in archive.trial_results:
            excluded = None
            if archive.bad_session:
                excluded = EXCLUDE_BAD_SESSION
            elif result.end_reason == EndReason.SKIPPED.value:
                excluded = EXCLUDE_SKIPPED
            elif result.t < min_trial_duration:
                excluded = EXCLUDE_ACCIDENTAL
            rows.append(
                TrialAggregate(
                    participant_id=archive.participant.id,
                    group=archive.participant.group,
                    block=result.block,
                    trial=result.trial,
                    t=result.t,
                    d=result.d,
                    score=result.score,
                    end_reason=result.end_reason,
                    excluded=excluded,
                )
            )
    return rows


def outlier_mask(values: Sequence[float]) -> list[bool]:
    """True where a value sits more than three sample deviations from the mean.

    Cells with fewer than two values (or zero spread) flag nothing.
    """
    if len(values) < 2:
        return [False] * len(values)
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1))
    if sd == 0.0:
        return [False] * len(values)
    return [bool(abs(v - mean) > 3.0 * sd) for v in arr]


def remove_outliers(values: Sequence[float]) -> tuple[list[float], list[float]]:
    """Split one cell's values into kept and removed by the 3-sd rule."""
    mask = outlier_mask(values)
    kept = [v for v, out in zip(values, mask) if not out]
    removed = [v for v, out in zip(values, mask) if out]
    return kept, removed


def apply_outlier_flags(rows: Sequence[TrialAggregate]) -> list[TrialAggregate]:
    """Flag outliers per participant, per block, per measure, independently.

    Globally excluded rows never participate: a skipped trial neither gets
    flagged nor influences anyone's mean.
    """
    flags: dict[int, set[str]] = {i: set() for i in range(len(rows))}
    cells: dict[tuple[str, int], list[int]] = {}
    for i, row in enumerate(rows):
        if row.excluded is None:
            cells.setdefault((row.participant_id, row.block), []).append(i)
    for indices in cells.values():
        for measure in MEASURES:
            values = [rows[i].measure(measure) for i in indices]
            for i, is_outlier in zip(indices, outlier_mask(values)):
                if is_outlier:
                    flags[i].add(measure)
    return [replace(row, outliers=frozenset(flags[i])) for i, row in enumerate(rows)]


@dataclass(frozen=True)
class SummaryRow:
    group: str
    block: int
    measure: str
    n: int
    mean: float | None  # None marks an empty cell, never coerced to zero
    sd: float | None    # None when fewer than two values


def block_group_summary(rows: Sequence[TrialAggregate]) -> list[SummaryRow]:
    groups = sorted({row.group for row in rows})
    blocks = sorted({row.block for row in rows})
    summary: list[SummaryRow] = []
    for group in groups:
        for block in blocks:
            for measure in MEASURES:
                values = [
                    row.measure(measure)
                    for row in rows
                    if row.group == group and row.block == block and row.included_for(measure)
                ]
                if not values:
                    summary.append(SummaryRow(group, block, measure, 0, None, None))
                    continue
                arr = np.asarray(values, dtype=float)
                sd = float(arr.std(ddof=1)) if len(values) >= 2 else None
                summary.append(
                    SummaryRow(group, block, measure, len(values), float(arr.mean()), sd)
                )
    return summary


def make_grid(start: float, end: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError(f"grid step must be > 0, got {step}")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def time_course(
    frames: Sequence[FrameLogEntry], grid: Sequence[float], goal: Vec3
) -> list[float]:
    """Residual distance to the goal resampled onto the grid.

    Zero-order hold: each grid point takes the most recent frame at or
    before it. Points before the first frame hold the first frame's value
    (the participant has not moved yet) and trials shorter than the grid
    are extended with their final value.
    """
    if not frames:
        raise ValueError("time_course needs at least one frame")
    distances = [horizontal_distance(Vec3(f.x, 0.0, f.z), goal) for f in frames]
    times = [f.t for f in frames]
    samples: list[float] = []
    cursor = 0
    for point in grid:
        while cursor + 1 < len(times) and times[cursor + 1] <= point:
            cursor += 1
        if point < times[0]:
            samples.append(distances[0])
        else:
            samples.append(distances[cursor])
    return samples


def mean_curves(
    courses: Sequence[tuple[str, Sequence[float]]], grouping: dict[str, str]
) -> tuple[dict[str, list[float]], dict[str, list[float]]]:
    """Pointwise mean curves, first per participant, then per group.

    courses pairs a participant id with one trial's resampled curve; the
    group means average the participant means, not the raw trials, so a
    participant with many trials does not dominate their group.
    """
    by_participant: dict[str, list[Sequence[float]]] = {}
    for pid, curve in courses:
        by_participant.setdefault(pid, []).append(curve)
    participant_means = {
        pid: np.asarray(curves, dtype=float).mean(axis=0).tolist()
        for pid, curves in by_participant.items()
    }
    by_group: dict[str, list[list[float]]] = {}
    for pid, mean in participant_means.items():
        group = grouping.get(pid, "")
        by_group.setdefault(group, []).append(mean)
    group_means = {
        group: np.asarray(means, dtype=float).mean(axis=0).tolist()
        for group, means in by_group.items()
    }
    return participant_means, group_means


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def write_aggregates_csv(rows: Sequence[TrialAggregate], path: Path) -> None:
    lines = [
        "participant,group,block,trial,t,d,score,end_reason,excluded,"
        "outlier_t,outlier_d,outlier_score"
    ]
    for r in rows:
        lines.append(
            f"{r.participant_id},{r.group},{r.block},{r.trial},{r.t:.6f},{r.d:.6f},"
            f"{r.score},{r.end_reason},{r.excluded or ''},"
            f"{1 if 't' in r.outliers else 0},{1 if 'd' in r.outliers else 0},"
            f"{1 if 'score' in r.outliers else 0}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_summary_csv(rows: Sequence[SummaryRow], path: Path) -> None:
    lines = ["group,block,measure,n,mean,sd"]
    for r in rows:
        lines.append(f"{r.group},{r.block},{r.measure},{r.n},{_fmt(r.mean)},{_fmt(r.sd)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_analysis(
    in_dir: Path | str,
    out_dir: Path | str,
    grid_spec: tuple[float, float, float] = DEFAULT_GRID,
    min_trial_duration: float = DEFAULT_MIN_TRIAL_DURATION,
) -> dict[str, Path]:
    """Read every session archive under in_dir and write the three tables."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    archives = [read_session_archive(p) for p in list_session_dirs(in_dir)]

    rows = apply_outlier_flags(collect_aggregates(archives, min_trial_duration))
    write_aggregates_csv(rows, out / "aggregates.csv")
    write_summary_csv(block_group_summary(rows), out / "summary.csv")

    grid = make_grid(*grid_spec)
    course_rows: list[str] = ["scope,group,participant,trial,time,value"]
    courses: list[tuple[str, list[float]]] = []
    grouping: dict[str, str] = {}
    for archive in archives:
        grouping[archive.participant.id] = archive.participant.group
        goal = archive.scenario.goal_position
        excluded_keys = {
            (row.block, row.trial)
            for row in collect_aggregates([archive], min_trial_duration)
            if row.excluded is not None
        }
        ordinal = 0
        for result, frames in zip(archive.trial_results, archive.movement_logs):
            ordinal += 1
            if (result.block, result.trial) in excluded_keys or not frames:
                continue
            curve = time_course(frames, grid, goal)
            courses.append((archive.participant.id, curve))
            for point, value in zip(grid, curve):
                course_rows.append(
                    f"trial,{archive.participant.group},{archive.participant.id},"
                    f"{ordinal},{point:.6f},{value:.6f}"
                )
    participant_means, group_means = mean_curves(courses, grouping) if courses else ({}, {})
    for pid in sorted(participant_means):
        for point, value in zip(grid, participant_means[pid]):
            course_rows.append(
                f"participant_mean,{grouping.get(pid, '')},{pid},,{point:.6f},{value:.6f}"
            )
    for group in sorted(group_means):
        for point, value in zip(grid, group_means[group]):
            course_rows.append(f"group_mean,{group},,,{point:.6f},{value:.6f}")
    (out / "timecourses.csv").write_text("\n".join(course_rows) + "\n", encoding="utf-8")

    return {
        "aggregates": out / "aggregates.csv",
        "summary": out / "summary.csv",
        "timecourses": out / "timecourses.csv",
    }
