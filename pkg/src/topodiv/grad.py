"""Subgradients of the divergence with respect to both point clouds.

The divergence is a sum of bar lengths, each bar pinned to a birth edge and
a death triangle of the doubled comparison matrix. A bar's death contributes
+1 and its birth -1 to the entry realizing the simplex value (the maximal
edge of the triangle, ties broken toward the lexicographically smallest
pair). The entry then routes to cloud coordinates by quadrant: the zero
block moves nothing, a glue entry is a first-cloud distance, and a
second-copy entry is a min (or max) of corresponding distances in the two
clouds, so its subgradient flows to whichever cloud attains it.

Minimum bypassing is the descent heuristic for the second-copy min: when a
death attribution wants such an entry to shrink but the min is attained by
the other cloud, the first cloud receives the direction anyway, so descent
can pull its distance below the competing one instead of stalling.

Smoothing averages each point's gradient with its neighbors', which trades
per-point accuracy for a less jagged descent path on dense clouds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError, ValidationError
from .geometry import PointCloud, pairwise_distances
from .rcross import VARIANTS, _dim1_bars, assemble_cross_matrix

COINCIDENCE_TOL = 1e-12


@dataclass(frozen=True)
class GradientField:
    """Per-point subgradients for the two clouds of one divergence value."""

    d_x: np.ndarray
    d_x_tilde: np.ndarray


def _unit(points: np.ndarray, a: int, b: int, which: str) -> np.ndarray:
    diff = points[a] - points[b]
    norm = float(np.linalg.norm(diff))
    if norm < COINCIDENCE_TOL:
        raise SingularityError(
            f"points {a} and {b} of the {which} cloud coincide; "
            "the distance direction through them is undefined",
            (a, b),
        )
    return diff / norm


def _argmax_pair(m: np.ndarray, triangle: tuple[int, int, int]) -> tuple[int, int]:
    u, v, s = triangle
    pairs = ((u, v), (u, s), (v, s))
    values = np.array([m[p, q] for p, q in pairs])
    return pairs[int(np.argmax(values))]


def _directional(
    x: PointCloud,
    x_tilde: PointCloud,
    variant: str,
    minimum_bypass: bool,
    names: tuple[str, str] = ("first", "second"),
) -> tuple[float, np.ndarray, np.ndarray]:
    """Value and per-cloud gradients of the one-way divergence of (x, x_tilde).

    ``names`` labels the two arguments in singularity errors, so the reversed
    direction of the symmetrized value can keep reporting the caller's order.
    """
    n = x.n
    w = pairwise_distances(x)
    wt = pairwise_distances(x_tilde)
    m = assemble_cross_matrix(w, wt, variant).values
    bars = _dim1_bars(m, n, True)

    gx = np.zeros_like(x.points)
    gxt = np.zeros_like(x_tilde.points)
    value = 0.0

    def route(sign: float, p: int, q: int, bypass: bool) -> None:
        if q < n:
            return
        if p < n:
            if q - n == p:
                return
            a, b = q - n, p
            if variant == "min" or w.values[a, b] > wt.values[a, b]:
                g = _unit(x.points, a, b, names[0])
                gx[a] += sign * g
                gx[b] -= sign * g
            if variant == "max" and wt.values[a, b] > w.values[a, b]:
                g = _unit(x_tilde.points, a, b, names[1])
                gxt[a] += sign * g
                gxt[b] -= sign * g
            return
        a, b = p - n, q - n
        if variant == "max" or w.values[a, b] < wt.values[a, b] or (bypass and sign > 0):
            g = _unit(x.points, a, b, names[0])
            gx[a] += sign * g
            gx[b] -= sign * g
        if variant == "min" and wt.values[a, b] < w.values[a, b]:
            g = _unit(x_tilde.points, a, b, names[1])
            gxt[a] += sign * g
            gxt[b] -= sign * g

    for bar in bars:
        value += bar.length
        dp, dq = _argmax_pair(m, bar.death_simplex)
        route(+1.0, dp, dq, minimum_bypass)
        bp, bq = bar.birth_simplex
        route(-1.0, bp, bq, False)

    return value, gx, gxt


def rtd_subgradient(
    x: PointCloud,
    x_tilde: PointCloud,
    minimum_bypass: bool = False,
    variant: str = "min",
) -> tuple[float, GradientField]:
    """Symmetrized divergence value and its subgradients for both clouds.

    The value equals the symmetrized divergence exactly; the gradients sum
    the two directional terms with the one-half factor. Raises a singularity
    error when a gradient would route through two coincident points.
    """
    if variant not in VARIANTS:
        raise ValidationError(f"unknown cross matrix variant {variant!r}")
    if x.n != x_tilde.n:
        raise ValidationError(
            f"clouds must have the same number of points, got {x.n} and {x_tilde.n}"
        )
    v1, gx1, gxt1 = _directional(x, x_tilde, variant, minimum_bypass)
    v2, gxt2, gx2 = _directional(x_tilde, x, variant, minimum_bypass, names=("second", "first"))
    field = GradientField(0.5 * (gx1 + gx2), 0.5 * (gxt1 + gxt2))
    return 0.5 * (v1 + v2), field


def smooth_gradients(
    grads: np.ndarray,
    cloud: PointCloud,
    beta: float = 0.5,
    knn: int | None = 8,
    radius: float | None = None,
) -> np.ndarray:
    """Blend each point's gradient with the mean over its neighborhood.

    The output row for point i is beta * own + (1 - beta) * mean over the
    neighbors of i, where the neighborhood is the knn nearest other points
    (the default) or every other point within the given radius. A point with
    an empty neighborhood keeps its own gradient.
    """
    grads = np.asarray(grads, dtype=np.float64)
    if grads.shape[0] != cloud.n:
        raise ValidationError(
            f"gradient rows ({grads.shape[0]}) must match cloud size ({cloud.n})"
        )
    if not 0.0 <= beta <= 1.0:
        raise ValidationError(f"beta must lie in [0, 1], got {beta}")
    if radius is None and (knn is None or knn < 0):
        raise ValidationError("neighborhood needs a knn count or a radius")

    d = pairwise_distances(cloud).values
    out = grads.copy()
    for i in range(cloud.n):
        if radius is not None:
            neighbors = np.nonzero((d[i] <= radius) & (np.arange(cloud.n) != i))[0]
        else:
            order = np.argsort(d[i], kind="stable")
            neighbors = order[order != i][:knn]
        if neighbors.size:
            out[i] = beta * grads[i] + (1.0 - beta) * grads[neighbors].mean(axis=0)
    return out
