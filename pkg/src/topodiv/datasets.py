"""Synthetic point-cloud generators and CSV ingestion.

Every generator is seeded and deterministic: the same spec produces the same
cloud on every run and platform, because all sampling goes through
numpy's default_rng with an explicit seed. Sizes and ambient dimensions are
overridable so the large sphere and torus families scale down to sizes a
laptop test run can afford.

Cluster shapes that the verbal descriptions leave open are pinned here:
the two-cluster cloud uses sigma 0.1 for the dense half and 0.5 for the
sparse half around a shared mean, the three-cluster cloud puts unit-sigma-0.1
Gaussians at (0,0), (1,0) and (5,0), nested spheres use ten unit spheres
with random centers inside a radius-5 outer sphere, and the torus has radii
R=2, r=1 before being isometrically embedded.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ValidationError
from .geometry import PointCloud

DATASET_NAMES = ("circle", "random", "clusters2", "clusters3", "spheres", "torus", "file")

DEFAULT_SIZES = {
    "circle": 100,
    "random": 500,
    "clusters2": 200,
    "clusters3": 300,
    "spheres": 17250,
    "torus": 5000,
}

DEFAULT_AMBIENT = {"spheres": 101, "torus": 100}

_SPHERE_CENTER_BOUND = 3.8
_SPHERE_CENTER_GAP = 2.05
_OUTER_RADIUS = 5.0


@dataclass(frozen=True)
class DatasetSpec:
    """What to generate: a dataset name plus size, seed and shape overrides.

    `size` and `ambient_dim` default to the values of the original datasets
    when left as None. For name "file", `path` must point at a CSV and `size`
    optionally requests a seeded row subsample.
    """

    name: str
    size: int | None = None
    seed: int = 0
    ambient_dim: int | None = None
    path: str | None = None

    def __post_init__(self):
        if self.name not in DATASET_NAMES:
            raise ValidationError(
                f"unknown dataset {self.name!r}, expected one of {DATASET_NAMES}"
            )
        if self.size is not None and self.size < 1:
            raise ValidationError(f"size must be >= 1, got {self.size}")
        if self.name == "file" and self.path is None:
            raise ValidationError("dataset 'file' needs a path")
        if self.name in ("circle", "random", "clusters2", "clusters3"):
            if self.ambient_dim not in (None, 2):
                raise ValidationError(f"{self.name} is always 2-dimensional")
        if self.name == "spheres" and self.ambient_dim is not None and self.ambient_dim < 3:
            raise ValidationError("spheres need ambient_dim >= 3")
        if self.name == "torus" and self.ambient_dim is not None and self.ambient_dim < 3:
            raise ValidationError("torus needs ambient_dim >= 3")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DatasetSpec":
        return cls(**json.loads(text))


def circle_cloud(n: int = 100, seed: int = 0) -> PointCloud:
    """n points randomly distributed on the unit circle."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    return PointCloud(np.column_stack([np.cos(theta), np.sin(theta)]))


def random_square_cloud(n: int = 500, seed: int = 0) -> PointCloud:
    """n points uniform on the unit square, structureless by design."""
    rng = np.random.default_rng(seed)
    return PointCloud(rng.uniform(0.0, 1.0, size=(n, 2)))


def two_clusters_cloud(n: int = 200, seed: int = 0) -> PointCloud:
    """Dense and sparse Gaussian clusters sharing one mean.

    The first floor(n/2) rows form the dense cluster (sigma 0.1), the rest
    the sparse one (sigma 0.5). Only density separates the halves, which is
    what makes the cloud a density-preservation probe.
    """
    rng = np.random.default_rng(seed)
    half = n // 2
    dense = rng.normal(0.0, 0.1, size=(half, 2))
    sparse = rng.normal(0.0, 0.5, size=(n - half, 2))
    return PointCloud(np.vstack([dense, sparse]))


def three_clusters_cloud(n: int = 300, seed: int = 0) -> PointCloud:
    """Three sigma-0.1 Gaussian clusters, two of them much closer together.

    Centers sit at (0,0), (1,0) and (5,0) in row blocks of floor(n/3),
    floor(n/3) and the remainder, so inter-cluster distances are the global
    structure a faithful embedding has to keep.
    """
    rng = np.random.default_rng(seed)
    per = n // 3
    counts = (per, per, n - 2 * per)
    centers = ((0.0, 0.0), (1.0, 0.0), (5.0, 0.0))
    blocks = [
        center + rng.normal(0.0, 0.1, size=(count, 2))
        for count, center in zip(counts, np.array(centers))
    ]
    return PointCloud(np.vstack(blocks))


def nested_spheres_cloud(
    n: int = 17250, seed: int = 0, ambient_dim: int = 101
) -> tuple[PointCloud, np.ndarray]:
    """Ten disjoint unit spheres inside one radius-5 sphere, plus the centers.

    Rows come in eleven blocks: floor(n/11) points on each unit sphere, the
    remainder on the outer sphere centered at the origin. Unit-sphere centers
    are rejection-sampled from the radius-3.8 ball until all pairwise center
    distances exceed 2.05, which keeps the small spheres disjoint from each
    other and strictly inside the outer one. Returns the cloud and the
    (11, ambient_dim) center array with the origin last.
    """
    if n < 11:
        raise ValidationError(f"spheres need at least 11 points, got {n}")
    if ambient_dim < 3:
        raise ValidationError("spheres need ambient_dim >= 3")
    rng = np.random.default_rng(seed)
    centers = []
    tries = 0
    while len(centers) < 10:
        tries += 1
        if tries > 10000:
            raise ValidationError("could not place 10 disjoint sphere centers")
        g = rng.normal(size=ambient_dim)
        c = g / np.linalg.norm(g) * _SPHERE_CENTER_BOUND * rng.uniform() ** (1.0 / ambient_dim)
        if all(np.linalg.norm(c - other) > _SPHERE_CENTER_GAP for other in centers):
            centers.append(c)
    centers.append(np.zeros(ambient_dim))
    centers = np.array(centers)

    per = n // 11
    counts = [per] * 10 + [n - 10 * per]
    radii = [1.0] * 10 + [_OUTER_RADIUS]
    blocks = []
    for count, center, radius in zip(counts, centers, radii):
        g = rng.normal(size=(count, ambient_dim))
        blocks.append(center + radius * g / np.linalg.norm(g, axis=1, keepdims=True))
    return PointCloud(np.vstack(blocks)), centers


def torus_cloud(n: int = 5000, seed: int = 0, ambient_dim: int = 100) -> PointCloud:
    """n points on a 2-torus (R=2, r=1) isometrically embedded in ambient_dim.

    The torus is sampled uniformly in its two angles, then mapped through a
    seeded random orthonormal 3-frame, so pairwise distances match the 3-d
    torus exactly while the coordinates genuinely live in the higher space.
    """
    if ambient_dim < 3:
        raise ValidationError("torus needs ambient_dim >= 3")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 2.0 * np.pi, n)
    v = rng.uniform(0.0, 2.0 * np.pi, n)
    ring = 2.0 + np.cos(v)
    q3 = np.column_stack([ring * np.cos(u), ring * np.sin(u), np.sin(v)])
    frame, _ = np.linalg.qr(rng.normal(size=(ambient_dim, 3)))
    return PointCloud(q3 @ frame.T)


def figure_eight_cloud(n: int = 100, seed: int = 0) -> PointCloud:
    """n points randomly distributed on a figure-eight curve.

    Uses the parametrization (cos t, sin(2t)/2). Random angles make an exact
    hit of the self-intersection at the origin a probability-zero event, so
    the cloud never contains coincident points.
    """
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 2.0 * np.pi, n)
    return PointCloud(np.column_stack([np.cos(t), np.sin(2.0 * t) / 2.0]))


def generate(spec: DatasetSpec) -> PointCloud:
    """Produce the point cloud a DatasetSpec describes."""
    if spec.name == "file":
        cloud = load_csv(spec.path)
        if spec.size is not None and spec.size < cloud.n:
            rng = np.random.default_rng(spec.seed)
            rows = np.sort(rng.choice(cloud.n, size=spec.size, replace=False))
            cloud = PointCloud(cloud.points[rows])
        return cloud

    n = spec.size if spec.size is not None else DEFAULT_SIZES[spec.name]
    if spec.name == "circle":
        return circle_cloud(n, spec.seed)
    if spec.name == "random":
        return random_square_cloud(n, spec.seed)
    if spec.name == "clusters2":
        return two_clusters_cloud(n, spec.seed)
    if spec.name == "clusters3":
        return three_clusters_cloud(n, spec.seed)
    ambient = spec.ambient_dim if spec.ambient_dim is not None else DEFAULT_AMBIENT[spec.name]
    if spec.name == "spheres":
        cloud, _ = nested_spheres_cloud(n, spec.seed, ambient)
        return cloud
    return torus_cloud(n, spec.seed, ambient)


def save_csv(cloud: PointCloud, path) -> None:
    """Write one point per row, full float64 precision, no header."""
    np.savetxt(path, cloud.points, delimiter=",", fmt="%.17g")


def load_csv(path) -> PointCloud:
    """Read a rectangular numeric CSV as a point cloud.

    A single leading non-numeric row is treated as a header and skipped;
    anything non-numeric after that, or a ragged row, is an error.
    """
    try:
        with open(path, newline="") as handle:
            raw = [row for row in csv.reader(handle) if any(cell.strip() for cell in row)]
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    if not raw:
        raise ValidationError(f"{path} has no data rows")

    start = 0
    try:
        [float(cell) for cell in raw[0]]
    except ValueError:
        start = 1
    if start == len(raw):
        raise ValidationError(f"{path} has a header but no data rows")

    width = len(raw[start])
    points = np.empty((len(raw) - start, width))
    for i, row in enumerate(raw[start:]):
        if len(row) != width:
            raise ValidationError(
                f"{path} row {start + i + 1} has {len(row)} cells, expected {width}"
            )
        try:
            points[i] = [float(cell) for cell in row]
        except ValueError as exc:
            raise ValidationError(f"{path} row {start + i + 1}: {exc}") from exc
    return PointCloud(points)
