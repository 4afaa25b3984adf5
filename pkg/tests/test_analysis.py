import pytest

from navloop.analysis import (
    EXCLUDE_ACCIDENTAL,
    EXCLUDE_BAD_SESSION,
    EXCLUDE_SKIPPED,
    TrialAggregate,
    apply_outlier_flags,
    block_group_summary,
    collect_aggregates,
    make_grid,
    mean_curves,
    outlier_mask,
    remove_outliers,
    run_analysis,
    time_course,
)
from navloop.core import Vec3
from navloop.engine import FrameLogEntry, ParticipantInfo
from navloop.persistence import ResultRow, SessionArchive
from navloop.settings import (
    ACCURACY_GROUP_CONSTANTS,
    TIME_GROUP_CONSTANTS,
    demo_environment,
    demo_locomotion,
    demo_scenario,
)


def result(block=0, trial=0, t=5.0, d=1.0, score=500, end_reason="EndKey"):
    return ResultRow(
        block=block, trial=trial, t=t, d=d,
        time_component=0.0, distance_component=0.0, reward=0.0,
        score=score, end_reason=end_reason, path_length=0.0,
    )


def archive_of(results, pid="p1", group="g1", bad=False):
    return SessionArchive(
        environment=demo_environment(),
        locomotion=demo_locomotion(),
        scenario=demo_scenario(),
        participant=ParticipantInfo(id=pid, group=group),
        session_id=f"s_{pid}",
        created_at="x",
        leaderboard_mode="Real",
        bad_session=bad,
        survey_responses=(),
        trial_results=tuple(results),
        movement_logs=tuple(() for _ in results),
        notes=(),
    )


# --- exclusion rules ---------------------------------------------------------


def test_skipped_trials_excluded():
    rows = collect_aggregates([archive_of([result(end_reason="Skipped"), result(trial=1)])])
    assert rows[0].excluded == EXCLUDE_SKIPPED
    assert rows[1].excluded is None


def test_short_trials_count_as_accidental():
    rows = collect_aggregates([archive_of([result(t=0.3), result(trial=1, t=0.5)])])
    assert rows[0].excluded == EXCLUDE_ACCIDENTAL
    assert rows[1].excluded is None  # the floor is strict: t < 0.5, not <=


def test_custom_duration_floor():
    rows = collect_aggregates([archive_of([result(t=0.9)])], min_trial_duration=1.0)
    assert rows[0].excluded == EXCLUDE_ACCIDENTAL


def test_bad_session_excludes_everything_with_priority():
    archive = archive_of(
        [result(end_reason="Skipped"), result(trial=1, t=0.1), result(trial=2)], bad=True
    )
    rows = collect_aggregates([archive])
    assert [r.excluded for r in rows] == [EXCLUDE_BAD_SESSION] * 3


def test_skip_beats_accidental():
    rows = collect_aggregates([archive_of([result(t=0.1, end_reason="Skipped")])])
    assert rows[0].excluded == EXCLUDE_SKIPPED


# --- outlier rule ------------------------------------------------------------


def test_outlier_mask_textbook_case():
    values = [1.0] * 10 + [100.0]
    # mean 10, sample sd 29.8496...; |100 - 10| = 90 barely exceeds 3 sd
    assert outlier_mask(values) == [False] * 10 + [True]
    kept, removed = remove_outliers(values)
    assert kept == [1.0] * 10
    assert removed == [100.0]


def test_outlier_mask_degenerate_cells():
    assert outlier_mask([]) == []
    assert outlier_mask([5.0]) == [False]
    assert outlier_mask([2.0, 2.0, 2.0]) == [False, False, False]  # zero spread


def test_outlier_removal_is_idempotent_here():
    values = [1.0] * 10 + [100.0]
    kept, _ = remove_outliers(values)
    again, removed = remove_outliers(kept)
    assert removed == []
    assert again == kept


def cell_rows(pid, block, t_values, **overrides):
    rows = []
    for i, t in enumerate(t_values):
        rows.append(
            TrialAggregate(
                participant_id=pid,
                group=overrides.get("group", "g1"),
                block=block,
                trial=i,
                t=t,
                d=overrides.get("d", 1.0),
                score=overrides.get("score", 500),
                end_reason="EndKey",
                excluded=overrides.get("excluded"),
            )
        )
    return rows


def linspace(lo, hi, n):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def test_planted_outliers_flagged_per_cell_and_measure():
    base = linspace(9.0, 11.0, 14)
    rows = (
        cell_rows("pA", 0, base + [100.0])       # planted t outlier
        + cell_rows("pA", 1, base + [10.0])      # clean cell
        + cell_rows("pB", 0, base + [10.0])      # clean cell, other participant
    )
    flagged = apply_outlier_flags(rows)
    outliers = [(r.participant_id, r.block, r.trial) for r in flagged if r.outliers]
    assert outliers == [("pA", 0, 14)]
    assert flagged[14].outliers == frozenset({"t"})  # d and score stay clean
    assert flagged[14].included_for("d") and not flagged[14].included_for("t")


def test_excluded_rows_do_not_shift_the_cell_statistics():
    base = linspace(9.0, 11.0, 15)
    clean = apply_outlier_flags(cell_rows("pA", 0, base))
    # an excluded 1000-second trial in the same cell must not mask anything
    spiked = cell_rows("pA", 0, base) + [
        TrialAggregate(
            participant_id="pA", group="g1", block=0, trial=99,
            t=1000.0, d=1.0, score=0, end_reason="Skipped", excluded=EXCLUDE_SKIPPED,
        )
    ]
    flagged = apply_outlier_flags(spiked)
    assert [r.outliers for r in flagged[:15]] == [r.outliers for r in clean]
    assert flagged[15].outliers == frozenset()  # excluded rows are never flagged


def test_second_pass_after_removal_flags_nothing():
    base = linspace(9.0, 11.0, 14) + [100.0]
    flagged = apply_outlier_flags(cell_rows("pA", 0, base))
    survivors = [r for r in flagged if r.included_for("t")]
    again = apply_outlier_flags([
        TrialAggregate(
            participant_id=r.participant_id, group=r.group, block=r.block, trial=r.trial,
            t=r.t, d=r.d, score=r.score, end_reason=r.end_reason,
        )
        for r in survivors
    ])
    assert all(not r.outliers for r in again)


# --- summary table -----------------------------------------------------------


def test_summary_hand_computed_cell():
    rows = cell_rows("pA", 0, [10.0, 11.0, 12.0])
    summary = block_group_summary(rows)
    t_row = next(r for r in summary if r.measure == "t")
    assert (t_row.group, t_row.block, t_row.n) == ("g1", 0, 3)
    assert t_row.mean == pytest.approx(11.0)
    assert t_row.sd == pytest.approx(1.0)


def test_summary_single_value_has_no_sd():
    summary = block_group_summary(cell_rows("pA", 0, [10.0]))
    t_row = next(r for r in summary if r.measure == "t")
    assert t_row.n == 1
    assert t_row.mean == 10.0
    assert t_row.sd is None


def test_summary_empty_cell_is_absent_not_zero():
    rows = cell_rows("pA", 0, [10.0], excluded=EXCLUDE_SKIPPED)
    summary = block_group_summary(rows)
    t_row = next(r for r in summary if r.measure == "t")
    assert t_row.n == 0
    assert t_row.mean is None
    assert t_row.sd is None


def test_summary_outlier_excluded_only_from_its_measure():
    base = linspace(9.0, 11.0, 14)
    flagged = apply_outlier_flags(cell_rows("pA", 0, base + [100.0]))
    summary = block_group_summary(flagged)
    by_measure = {r.measure: r for r in summary}
    assert by_measure["t"].n == 14       # outlier dropped
    assert by_measure["d"].n == 15       # untouched measure keeps the row
    assert by_measure["t"].mean == pytest.approx(sum(base) / 14)


# --- time courses -------------------------------------------------------------


def frame(t, x, z=0.0):
    return FrameLogEntry(t=t, x=x, z=z, yaw=0.0, lights_on=True, sound_on=True)


GOAL = Vec3(0.0, 0.0, 0.0)


def test_make_grid_inclusive():
    grid = make_grid(0.0, 30.0, 0.1)
    assert len(grid) == 301
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(30.0)
    assert make_grid(0.0, 1.0, 0.3) == pytest.approx([0.0, 0.3, 0.6, 0.9])
    with pytest.raises(ValueError):
        make_grid(0.0, 1.0, 0.0)


def test_time_course_zero_order_hold():
    frames = [frame(1.0, 3.0), frame(2.0, 2.0), frame(3.0, 0.5)]
    grid = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
    curve = time_course(frames, grid, GOAL)
    assert curve == pytest.approx([3, 3, 3, 3, 2, 2, 0.5, 0.5, 0.5])


def test_time_course_short_trial_extends_final_value():
    frames = [frame(0.5, 1.0)]
    curve = time_course(frames, [0.0, 1.0, 10.0, 30.0], GOAL)
    assert curve == pytest.approx([1.0, 1.0, 1.0, 1.0])


def test_time_course_uses_horizontal_distance():
    frames = [frame(1.0, 3.0, 4.0)]
    curve = time_course(frames, [2.0], GOAL)
    assert curve == pytest.approx([5.0])


def test_time_course_rejects_empty():
    with pytest.raises(ValueError):
        time_course([], [0.0], GOAL)


def test_mean_curves_average_participants_not_trials():
    courses = [
        ("pA", [0.0, 2.0]),
        ("pA", [2.0, 4.0]),
        ("pB", [5.0, 7.0]),
    ]
    participant_means, group_means = mean_curves(courses, {"pA": "g1", "pB": "g1"})
    assert participant_means["pA"] == pytest.approx([1.0, 3.0])
    assert participant_means["pB"] == pytest.approx([5.0, 7.0])
    # two trials for pA must not outweigh pB inside the group
    assert group_means["g1"] == pytest.approx([3.0, 5.0])


def test_mean_curves_split_groups():
    courses = [("pA", [1.0]), ("pB", [3.0])]
    _, group_means = mean_curves(courses, {"pA": "g1", "pB": "g2"})
    assert group_means == {"g1": pytest.approx([1.0]), "g2": pytest.approx([3.0])}


# --- end to end over simulated sessions ---------------------------------------


def test_run_analysis_writes_three_tables(tmp_path):
    from navloop.agents import AgentPolicy, AgentSpec, run_cohort
    from navloop.settings import EnvironmentSettings, FireflyParams, ScenarioSettings

    env = EnvironmentSettings(
        walls_present_per_block=(True, False),
        floor_extends_per_block=(False, True),
        survey_links=(),
    )
    scen = ScenarioSettings(
        trials_per_block=(2, 2),
        max_trial_duration=30.0,
        feedback_display_duration=0.1,
        firefly_per_block=(FireflyParams(radius=0.75), FireflyParams(radius=1.5)),
    )
    specs = [
        AgentSpec(
            participant=ParticipantInfo(id="t01", group="time"),
            policy=AgentPolicy(observe_ticks=40, stop_radius=0.5, observation_noise=0.02),
            score=TIME_GROUP_CONSTANTS,
        ),
        AgentSpec(
            participant=ParticipantInfo(id="a01", group="accuracy"),
            policy=AgentPolicy(observe_ticks=40, stop_radius=0.5, observation_noise=0.02),
            score=ACCURACY_GROUP_CONSTANTS,
        ),
    ]
    sessions = tmp_path / "sessions"
    run_cohort(specs, env, demo_locomotion(), scen, sessions, seed=4)

    tables = run_analysis(sessions, tmp_path / "tables", grid_spec=(0.0, 10.0, 0.5))
    aggregates = tables["aggregates"].read_text().splitlines()
    assert aggregates[0].startswith("participant,group,block,trial,")
    assert len(aggregates) == 1 + 8  # 2 participants x 4 trials

    summary = tables["summary"].read_text().splitlines()
    assert summary[0] == "group,block,measure,n,mean,sd"
    assert len(summary) == 1 + 2 * 2 * 3  # groups x blocks x measures

    courses = tables["timecourses"].read_text().splitlines()
    assert courses[0] == "scope,group,participant,trial,time,value"
    scopes = {line.split(",")[0] for line in courses[1:]}
    assert scopes == {"trial", "participant_mean", "group_mean"}
    # every group curve spans the full grid
    group_rows = [line for line in courses[1:] if line.startswith("group_mean,time,")]
    assert len(group_rows) == 21


def test_run_analysis_empty_input(tmp_path):
    tables = run_analysis(tmp_path / "none", tmp_path / "tables")
    assert tables["summary"].read_text() == "group,block,measure,n,mean,sd\n"
    assert tables["timecourses"].read_text() == "scope,group,participant,trial,time,value\n"
