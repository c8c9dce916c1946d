"""Point clouds, distance matrices, and the +inf non-edge sentinel.

A point cloud is an ordered n x d array of float64 coordinates; row order is
identity-carrying, because cross-barcodes compare the i-th point of one cloud
with the i-th point of another. Distance-like weight matrices are symmetric,
have a zero diagonal, and may contain +inf entries meaning "these two vertices
are never joined". IEEE +inf already behaves as the required saturating
sentinel: it is strictly larger than every finite value and absorbs max().
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import ValidationError

INF = np.inf


@dataclass(frozen=True)
class PointCloud:
    """An ordered collection of points in R^d (rows are points)."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValidationError(f"point cloud must be 2-d (n x d), got shape {pts.shape}")
        if pts.shape[0] == 0 or pts.shape[1] == 0:
            raise ValidationError(f"point cloud must be non-empty, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("point cloud coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative weight matrix with zero diagonal; +inf allowed.

    Nothing here assumes the triangle inequality: any such matrix defines a
    weighted graph whose clique filtration is well formed, which is exactly
    what the barcode machinery consumes.
    """

    values: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.values, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"distance matrix must be square, got shape {m.shape}")
        if np.any(np.isnan(m)):
            raise ValidationError("distance matrix must not contain NaN")
        if np.any(m < 0):
            raise ValidationError("distance matrix entries must be nonnegative")
        if np.any(np.diag(m) != 0):
            raise ValidationError("distance matrix diagonal must be exactly zero")
        if not np.array_equal(m, m.T):
            raise ValidationError("distance matrix must be symmetric")
        object.__setattr__(self, "values", m)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def pairwise_distances(cloud: PointCloud) -> DistanceMatrix:
    """Euclidean pairwise distance matrix of a cloud.

    Computed through the condensed form so the result is exactly symmetric.
    """
    if cloud.n == 1:
        return DistanceMatrix(np.zeros((1, 1)))
    return DistanceMatrix(squareform(pdist(cloud.points, metric="euclidean")))


def combine_min(a: DistanceMatrix, b: DistanceMatrix) -> DistanceMatrix:
    """Entrywise minimum of two weight matrices of equal size."""
    _check_same_size(a, b)
    return DistanceMatrix(np.minimum(a.values, b.values))


def combine_max(a: DistanceMatrix, b: DistanceMatrix) -> DistanceMatrix:
    """Entrywise maximum; +inf saturates as expected."""
    _check_same_size(a, b)
    return DistanceMatrix(np.maximum(a.values, b.values))


def _check_same_size(a: DistanceMatrix, b: DistanceMatrix) -> None:
    if a.n != b.n:
        raise ValidationError(f"matrices must agree in size, got {a.n} and {b.n}")
