"""Direct divergence minimization over a movable point cloud.

Plain subgradient descent: no autoencoder, no batching, the whole cloud
moves at once. Each step evaluates the symmetrized divergence against a
fixed target, takes the movable cloud's subgradient, optionally smooths it
over point neighborhoods, and steps with a piecewise-constant learning
rate. The two descent tricks (smoothing, minimum bypassing) only shape the
path; the reported divergence values are always the exact ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularityError, ValidationError
from .geometry import PointCloud
from .grad import rtd_subgradient, smooth_gradients
from .persistence import _fmt_value
from .rcross import rtd

Trace = list[tuple[int, float]]


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the direct descent loop.

    The schedule is a step-sorted list of (step, rate) pairs starting at
    step 0; the rate in force is the one of the latest entry at or below
    the current step. ``warmstart``, when given, replaces the initial cloud
    argument (useful for starting from an external embedding).
    """

    steps: int = 100
    schedule: tuple[tuple[int, float], ...] = ((0, 0.1),)
    minimum_bypass: bool = False
    smoothing: bool = False
    beta: float = 0.5
    knn: int | None = 8
    radius: float | None = None
    warmstart: PointCloud | None = None

    def __post_init__(self):
        if self.steps < 0:
            raise ValidationError(f"step count must be nonnegative, got {self.steps}")
        if not self.schedule:
            raise ValidationError("the learning-rate schedule must not be empty")
        if self.schedule[0][0] != 0:
            raise ValidationError("the learning-rate schedule must start at step 0")
        steps = [s for s, _ in self.schedule]
        if steps != sorted(steps):
            raise ValidationError("the learning-rate schedule must be step-sorted")
        if any(rate <= 0 for _, rate in self.schedule):
            raise ValidationError("learning rates must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ValidationError(f"beta must lie in [0, 1], got {self.beta}")

    def rate_at(self, step: int) -> float:
        rate = self.schedule[0][1]
        for start, r in self.schedule:
            if start > step:
                break
            rate = r
        return rate


def minimize_rtd(
    movable_init: PointCloud, target: PointCloud, cfg: OptimizerConfig
) -> tuple[PointCloud, Trace]:
    """Descend the divergence to the target, returning the cloud and a trace.

    The trace holds one (step, value) pair per descent step, the value
    measured before that step's update, plus a final entry for the returned
    cloud. Values are not forced monotone; subgradient steps can overshoot.
    """
    movable = cfg.warmstart if cfg.warmstart is not None else movable_init
    if movable.n != target.n:
        raise ValidationError(
            f"clouds must have the same number of points, got {movable.n} and {target.n}"
        )
    points = movable.points.copy()
    trace: Trace = []
    for step in range(cfg.steps):
        cloud = PointCloud(points)
        try:
            value, grads = rtd_subgradient(
                cloud, target, minimum_bypass=cfg.minimum_bypass
            )
        except SingularityError as err:
            raise SingularityError(f"descent step {step}: {err}", err.indices) from err
        trace.append((step, value))
        g = grads.d_x
        if cfg.smoothing:
            g = smooth_gradients(g, cloud, beta=cfg.beta, knn=cfg.knn, radius=cfg.radius)
        points = points - cfg.rate_at(step) * g
    final = PointCloud(points)
    trace.append((cfg.steps, rtd(final, target)))
    return final, trace


def format_trace_csv(trace: Trace) -> str:
    lines = ["step,rtd"]
    lines.extend(f"{step},{_fmt_value(value)}" for step, value in trace)
    return "\n".join(lines) + "\n"
