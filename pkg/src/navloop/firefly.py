"""The dynamic goal marker: a fly buzzing randomly above the goal.

Each block configures a horizontal sampling disc centered on the goal and a
height band. The fly walks toward a target point in small fixed increments;
when it reaches the target a fresh one is sampled uniformly over the disc
(by area) and height band. The participant only ever sees the fly, so the
goal position is conveyed imprecisely: its long-run mean position sits
directly over the goal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

from .core import Vec3
from .settings import FireflyParams


@dataclass(frozen=True)
class FireflyState:
    position: Vec3
    target_sample: Vec3


def _sample_point(goal: Vec3, params: FireflyParams, rng: Random) -> Vec3:
    # Three draws in fixed order keep replay exact: radius, angle, height.
    # sqrt on the radius draw makes the disc sampling uniform by area.
    r = params.radius * math.sqrt(rng.random())
    theta = rng.random() * 2.0 * math.pi
    y = params.min_height + rng.random() * (params.max_height - params.min_height)
    return Vec3(goal.x + r * math.cos(theta), y, goal.z + r * math.sin(theta))


def firefly_init(goal: Vec3, params: FireflyParams, rng: Random) -> FireflyState:
    position = _sample_point(goal, params, rng)
    target = _sample_point(goal, params, rng)
    return FireflyState(position=position, target_sample=target)


def firefly_advance(
    state: FireflyState, goal: Vec3, params: FireflyParams, rng: Random
) -> FireflyState:
    """Move one tick toward the target, resampling the target when reached.

    The per-tick displacement never exceeds params.step_size, and because
    the position always lies on a segment between two in-disc points (or a
    step past one of them), it stays within radius + step_size of the goal
    horizontally and within the height band padded by step_size.
    """
    delta = state.target_sample - state.position
    dist = delta.length()
    if dist <= params.step_size:
        new_target = _sample_point(goal, params, rng)
        return FireflyState(position=state.target_sample, target_sample=new_target)
    step = delta.scaled(params.step_size / dist)
    return FireflyState(position=state.position + step, target_sample=state.target_sample)
