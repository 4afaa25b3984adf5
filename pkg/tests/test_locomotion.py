import math

import pytest
from hypothesis import given, strategies as st

from navloop.core import FrameInput, Pose, Vec3
from navloop.locomotion import (
    CollisionDisc,
    HeadBobState,
    SafeArea,
    WalkLockState,
    World,
    aim_from_pose,
    apply_teleport,
    arm_swing_speed,
    head_bob_step,
    physical_walk_step,
    teleop_step,
    teleport_resolve,
)
from navloop.settings import LocomotionSettings

ROOT_HALF = math.sqrt(2) / 2


def pose_at(x=0.0, y=0.0, z=0.0, yaw=0.0, pitch=0.0):
    return Pose(Vec3(x, y, z), yaw=yaw, pitch=pitch)


# --- shared teleoperation ---


def test_teleop_idle_is_zero():
    settings = LocomotionSettings(linear_velocity=2.0)
    frame = FrameInput(hmd=pose_at(yaw=90))
    assert teleop_step(pose_at(), frame, settings, 1 / 90) == Vec3()


def test_teleop_moves_along_yaw():
    settings = LocomotionSettings(linear_velocity=2.0)
    frame = FrameInput(hmd=pose_at(yaw=225), move_held=True)
    step = teleop_step(pose_at(), frame, settings, 0.5)
    assert step.length() == pytest.approx(1.0)
    assert step.x == pytest.approx(-ROOT_HALF)
    assert step.z == pytest.approx(-ROOT_HALF)
    assert step.y == 0


def test_teleop_scales_with_dt_and_velocity():
    settings = LocomotionSettings(linear_velocity=3.0)
    frame = FrameInput(hmd=pose_at(yaw=0), move_held=True)
    step = teleop_step(pose_at(), frame, settings, 1 / 90)
    assert step.z == pytest.approx(3.0 / 90)


# --- arm swing ---


def swing_settings(**kw):
    defaults = dict(arm_swing_threshold=0.005, arm_swing_gain=1.0)
    defaults.update(kw)
    return LocomotionSettings(**defaults)


def test_arm_swing_rejects_bad_frames():
    settings = swing_settings()
    with pytest.raises(ValueError):
        arm_swing_speed([], [], settings, 1 / 90)
    with pytest.raises(ValueError):
        arm_swing_speed([pose_at()], [pose_at(), pose_at()], settings, 1 / 90)
    with pytest.raises(ValueError):
        arm_swing_speed([pose_at()], [pose_at()], settings, 0)


def test_arm_swing_below_threshold_is_stationary():
    settings = swing_settings()
    prev = [pose_at(0), pose_at(1)]
    curr = [pose_at(0.004), pose_at(1.003)]
    assert arm_swing_speed(prev, curr, settings, 1 / 90) == 0.0


def test_arm_swing_any_controller_engages():
    settings = swing_settings()
    prev = [pose_at(0), pose_at(1)]
    curr = [pose_at(0.01), pose_at(1)]  # one moved, one still
    speed = arm_swing_speed(prev, curr, settings, 1 / 90)
    assert speed == pytest.approx(1.0 * (0.01 / 2) / (1 / 90))


def test_arm_swing_require_both_gates_on_all():
    settings = swing_settings(require_both_controllers=True)
    prev = [pose_at(0), pose_at(1)]
    one_moved = [pose_at(0.01), pose_at(1)]
    assert arm_swing_speed(prev, one_moved, settings, 1 / 90) == 0.0
    both_moved = [pose_at(0.01), pose_at(1.02)]
    speed = arm_swing_speed(prev, both_moved, settings, 1 / 90)
    assert speed == pytest.approx((0.01 + 0.02) / 2 * 90)


def test_arm_swing_gain_scales_linearly():
    prev = [pose_at(0)]
    curr = [pose_at(0.01)]
    base = arm_swing_speed(prev, curr, swing_settings(), 1 / 90)
    doubled = arm_swing_speed(prev, curr, swing_settings(arm_swing_gain=2.0), 1 / 90)
    assert doubled == pytest.approx(2 * base)


@given(st.permutations(range(4)))
def test_arm_swing_order_invariant(order):
    # speed is a mean over controllers, so their ordering must not matter
    settings = swing_settings()
    prevs = [pose_at(float(i)) for i in range(4)]
    currs = [pose_at(float(i) + 0.002 * (i + 1)) for i in range(4)]
    baseline = arm_swing_speed(prevs, currs, settings, 1 / 90)
    shuffled = arm_swing_speed(
        [prevs[i] for i in order], [currs[i] for i in order], settings, 1 / 90
    )
    assert shuffled == pytest.approx(baseline)


# --- head bob ---


def run_incremental(heights, pitches, settings):
    state = HeadBobState()
    steps = 0
    for h, p in zip(heights, pitches):
        state, fired = head_bob_step(state, h, p, settings)
        steps += int(fired)
    return steps


def flexion_scan(heights, pitches, settings):
    """Batch reformulation used as an independent check.

    Collapse the series to its height-changing frames, find direction
    reversals between consecutive movements, then count reversals whose
    extremum differs enough from the previous one and whose frame-local
    pitch change stays under the rejection threshold.
    """
    moves = [
        (i, heights[i] - heights[i - 1])
        for i in range(1, len(heights))
        if heights[i] != heights[i - 1]
    ]
    count = 0
    previous_extremum = None
    for k in range(1, len(moves)):
        frame, dh = moves[k]
        _, prev_dh = moves[k - 1]
        if (dh > 0) == (prev_dh > 0):
            continue
        extremum = heights[frame - 1]
        pitch_change = abs(pitches[frame] - pitches[frame - 1])
        if (
            previous_extremum is not None
            and abs(extremum - previous_extremum) > settings.bob_height_threshold
            and pitch_change <= settings.pitch_reject_threshold
        ):
            count += 1
        previous_extremum = extremum
    return count


BOB = LocomotionSettings(bob_height_threshold=0.03, pitch_reject_threshold=1.5)


def triangle_wave(amplitude, samples_per_leg, periods, base=1.5):
    heights = []
    for _ in range(periods):
        heights += [base + amplitude * k / samples_per_leg for k in range(samples_per_leg)]
        heights += [base + amplitude * (samples_per_leg - k) / samples_per_leg for k in range(samples_per_leg)]
    return heights


def test_constant_height_never_steps():
    heights = [1.5] * 200
    pitches = [0.0] * 200
    assert run_incremental(heights, pitches, BOB) == 0


def test_triangle_wave_steps_after_warmup():
    heights = triangle_wave(amplitude=0.06, samples_per_leg=10, periods=3)
    pitches = [0.0] * len(heights)
    # three peaks and two interior troughs reverse direction; the first
    # flexion is warm-up only, so five flexions give four steps
    assert run_incremental(heights, pitches, BOB) == 4
    assert flexion_scan(heights, pitches, BOB) == 4


def test_small_bobs_below_threshold_ignored():
    heights = triangle_wave(amplitude=0.02, samples_per_leg=10, periods=3)
    pitches = [0.0] * len(heights)
    assert run_incremental(heights, pitches, BOB) == 0


def test_pitch_spike_voids_the_step_but_updates_comparison():
    heights = triangle_wave(amplitude=0.06, samples_per_leg=5, periods=2)
    pitches = [0.0] * len(heights)
    # a pitch spike makes the next frame's pitch delta exceed the gate,
    # voiding the trough reversal detected at frame 11
    pitches[10] = 30.0
    clean = run_incremental(heights, [0.0] * len(heights), BOB)
    spiked = run_incremental(heights, pitches, BOB)
    assert spiked < clean
    assert flexion_scan(heights, pitches, BOB) == spiked


def test_plateau_keeps_direction():
    heights = [1.5, 1.56, 1.56, 1.56, 1.5, 1.44, 1.5, 1.56]
    pitches = [0.0] * len(heights)
    assert run_incremental(heights, pitches, BOB) == flexion_scan(heights, pitches, BOB)


increments = st.lists(
    st.sampled_from([-0.04, -0.02, -0.01, 0.0, 0.01, 0.02, 0.04]), min_size=2, max_size=120
)
pitch_moves = st.lists(st.sampled_from([0.0, 0.5, 2.5]), min_size=120, max_size=120)


@given(increments, pitch_moves)
def test_incremental_matches_batch_scan(steps, pitch_deltas):
    heights = [1.5]
    for d in steps:
        heights.append(heights[-1] + d)
    pitches = [0.0]
    for d in pitch_deltas[: len(heights) - 1]:
        pitches.append(pitches[-1] + d)
    pitches = pitches[: len(heights)]
    assert run_incremental(heights, pitches, BOB) == flexion_scan(heights, pitches, BOB)


# --- physical walking ---

AREA = SafeArea(width=3.0, depth=3.0, barrier_margin=0.5)


def test_walk_tracks_position_one_to_one():
    virtual, barrier, state = physical_walk_step(
        pose_at(0.5, 1.6, -0.25, yaw=10), WalkLockState(), AREA, trigger_held=False
    )
    assert (virtual.position.x, virtual.position.z) == (0.5, -0.25)
    assert virtual.position.y == 0.0  # floor plane, head height is presentation
    assert virtual.yaw == 10
    assert not barrier


def test_barrier_near_edge_and_outside():
    _, barrier, _ = physical_walk_step(pose_at(1.2, 1.6, 0), WalkLockState(), AREA, False)
    assert barrier  # 0.3 m from the edge
    _, barrier, _ = physical_walk_step(pose_at(2.0, 1.6, 0), WalkLockState(), AREA, False)
    assert barrier  # outside entirely
    _, barrier, _ = physical_walk_step(pose_at(0, 1.6, 0), WalkLockState(), AREA, False)
    assert not barrier


def test_lock_trigger_accumulates_yaw_offset():
    state = WalkLockState()
    # establish a reference yaw without the trigger
    _, _, state = physical_walk_step(pose_at(yaw=0), state, AREA, trigger_held=False)
    # rotate 30 degrees with the trigger held: the scene must not turn
    virtual, _, state = physical_walk_step(pose_at(yaw=30), state, AREA, trigger_held=True)
    assert virtual.yaw == pytest.approx(0.0)
    # release and rotate 10 more: the offset persists
    virtual, _, state = physical_walk_step(pose_at(yaw=40), state, AREA, trigger_held=False)
    assert virtual.yaw == pytest.approx(10.0)
    assert state.yaw_offset == pytest.approx(30.0)


def test_lock_trigger_wraps_across_zero():
    state = WalkLockState()
    _, _, state = physical_walk_step(pose_at(yaw=350), state, AREA, trigger_held=False)
    virtual, _, state = physical_walk_step(pose_at(yaw=10), state, AREA, trigger_held=True)
    # real rotation was +20 through the wrap, all absorbed by the offset
    assert state.yaw_offset == pytest.approx(20.0)
    assert virtual.yaw == pytest.approx(350.0)


# --- teleport ---

PORT = LocomotionSettings(method="Teleport", teleport_max_range=5.0)
EMPTY_WORLD = World(room_width=10.0, room_depth=10.0)


def test_teleport_zero_aim_rejected():
    with pytest.raises(ValueError):
        teleport_resolve(pose_at(0, 1.5, 0), Vec3(), PORT, EMPTY_WORLD)


def test_teleport_straight_down_lands_in_place():
    target = teleport_resolve(pose_at(1, 1.5, 2), Vec3(0, -1, 0), PORT, EMPTY_WORLD)
    assert target.valid
    assert (target.position.x, target.position.y, target.position.z) == (1, 0, 2)


def test_teleport_upward_or_level_invalid():
    assert not teleport_resolve(pose_at(0, 1.5, 0), Vec3(0, 1, 0), PORT, EMPTY_WORLD).valid
    assert not teleport_resolve(pose_at(0, 1.5, 0), Vec3(0, 0, 1), PORT, EMPTY_WORLD).valid
    # aiming down from floor level has no forward intersection either
    assert not teleport_resolve(pose_at(0, 0, 0), Vec3(0, -1, 1), PORT, EMPTY_WORLD).valid


def test_teleport_45_degrees_forward():
    target = teleport_resolve(pose_at(0, 1.5, 0), Vec3(0, -1, 1), PORT, EMPTY_WORLD)
    assert target.valid
    assert target.position.z == pytest.approx(1.5)
    assert target.position.x == pytest.approx(0.0)


def test_teleport_beyond_range_invalid():
    # shallow aim from 1.5 m: lands 15 m out, past holding range and the room
    target = teleport_resolve(pose_at(0, 1.5, 0), Vec3(0, -0.1, 1), PORT, EMPTY_WORLD)
    assert not target.valid
    assert target.position.z == pytest.approx(15.0)  # still reported for painting


def test_teleport_outside_room_invalid():
    # lands 3 m out: within holding range but past a small room's footprint
    small = World(room_width=2.0, room_depth=2.0)
    target = teleport_resolve(pose_at(0, 1.5, 0), Vec3(0, -1, 2), PORT, small)
    assert not target.valid


def test_teleport_blocked_by_collision_disc():
    world = World(collision_discs=(CollisionDisc(center=Vec3(0, 0, 1.5), radius=0.3),))
    blocked = teleport_resolve(pose_at(0, 1.5, 0), Vec3(0, -1, 1), PORT, world)
    assert not blocked.valid
    clear = teleport_resolve(pose_at(0, 1.5, 0), Vec3(0.8, -1, 1), PORT, world)
    assert clear.valid


def test_apply_teleport_keeps_orientation():
    pose = pose_at(0, 0, 0, yaw=123, pitch=-10)
    target = teleport_resolve(pose_at(0, 1.5, 0, yaw=123), Vec3(0, -1, 1), PORT, EMPTY_WORLD)
    moved = apply_teleport(pose, target)
    assert moved.yaw == 123
    assert moved.pitch == -10
    assert moved.position == target.position
    with pytest.raises(ValueError):
        apply_teleport(pose, teleport_resolve(pose_at(0, 1.5, 0), Vec3(0, 1, 0), PORT, EMPTY_WORLD))


def test_aim_from_pose_pitch_down():
    aim = aim_from_pose(pose_at(yaw=0, pitch=-45))
    assert aim.y == pytest.approx(-ROOT_HALF)
    assert aim.z == pytest.approx(ROOT_HALF)
    assert aim.x == pytest.approx(0.0, abs=1e-12)
