"""Embedding quality measures and the spanning-tree baseline loss.

Four views of how well a representation preserves the original cloud: plain
linear correlation of pairwise distances, triplet ranking agreement, optimal
transport between persistence diagrams (order-1 Wasserstein and bottleneck),
and the divergence value itself. The spanning-tree loss used by a popular
topology-regularized autoencoder is included as a comparison baseline; its
known failure modes (zero loss on topologically different clouds, jumps when
the tree flips) are exactly what the diagram-based measures avoid.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import ValidationError
from .geometry import PointCloud, pairwise_distances
from .persistence import Bar, build_filtration, compute_barcode
from .rcross import rtd


def _upper_distances(cloud: PointCloud) -> np.ndarray:
    d = pairwise_distances(cloud).values
    iu, ju = np.triu_indices(cloud.n, 1)
    return d[iu, ju]


def linear_correlation(x: PointCloud, z: PointCloud) -> float:
    """Pearson correlation between the two clouds' pairwise distances."""
    if x.n != z.n:
        raise ValidationError("clouds must have the same number of points")
    if x.n < 3:
        raise ValidationError("correlation needs at least three points")
    dx = _upper_distances(x)
    dz = _upper_distances(z)
    if np.ptp(dx) == 0.0 or np.ptp(dz) == 0.0:
        raise ValidationError("distance set has zero variance; correlation is undefined")
    dx = dx - dx.mean()
    dz = dz - dz.mean()
    return float(dx @ dz / np.sqrt((dx @ dx) * (dz @ dz)))


def triplet_accuracy(x: PointCloud, z: PointCloud, num_triplets: int = 10000, seed: int = 0) -> float:
    """Fraction of sampled triplets whose distance ordering both clouds agree on.

    For a triplet (i, j, k) the question is whether j or k is closer to i;
    exact ties agree only with exact ties. Sampling is uniform over ordered
    index triples with all three entries distinct.
    """
    if x.n != z.n:
        raise ValidationError("clouds must have the same number of points")
    if x.n < 3:
        raise ValidationError("triplets need at least three points")
    if num_triplets < 1:
        raise ValidationError("num_triplets must be positive")
    dx = pairwise_distances(x).values
    dz = pairwise_distances(z).values
    rng = np.random.default_rng(seed)
    agree = 0
    remaining = num_triplets
    while remaining > 0:
        draw = rng.integers(0, x.n, size=(2 * remaining + 8, 3))
        ok = (draw[:, 0] != draw[:, 1]) & (draw[:, 0] != draw[:, 2]) & (draw[:, 1] != draw[:, 2])
        i, j, k = draw[ok][:remaining].T
        sx = np.sign(dx[i, j] - dx[i, k])
        sz = np.sign(dz[i, j] - dz[i, k])
        agree += int((sx == sz).sum())
        remaining -= i.shape[0]
    return agree / num_triplets


def _finite_points(bars, dim: int | None) -> list[tuple[float, float]]:
    return [(bar.birth, bar.death) for bar in bars if bar.finite and (dim is None or bar.dim == dim)]


def _diagram_of(cloud: PointCloud, dim: int) -> list[tuple[float, float]]:
    filt = build_filtration(pairwise_distances(cloud), max_dim=dim + 1)
    return _finite_points(compute_barcode(filt, dims=(dim,)), dim)


def wasserstein_distance(a, b, order: float = 1.0) -> float:
    """Order-p Wasserstein between two finite diagrams, L-inf ground metric.

    Accepts bars or plain (birth, death) pairs; infinite bars are ignored.
    Unmatched points pay their distance to the diagonal, realized through an
    assignment problem where each diagram is padded with one diagonal slot per
    point of the other.
    """
    if order < 1.0:
        raise ValidationError("wasserstein order must be ≥ 1")
    pa = _as_points(a)
    pb = _as_points(b)
    na, nb = len(pa), len(pb)
    if na == 0 and nb == 0:
        return 0.0
    costs = np.zeros((na + nb, nb + na))
    diag_a = np.array([(d - b) / 2.0 for b, d in pa])
    diag_b = np.array([(d - b) / 2.0 for b, d in pb])
    if na and nb:
        ab = np.array(pa)[:, None, :] - np.array(pb)[None, :, :]
        costs[:na, :nb] = np.abs(ab).max(axis=2)
    costs[:na, nb:] = diag_a[:, None]
    costs[na:, :nb] = diag_b[None, :]
    rows, cols = linear_sum_assignment(costs ** order)
    return float(np.sum(costs[rows, cols] ** order) ** (1.0 / order))


def _as_points(diagram) -> list[tuple[float, float]]:
    points = []
    for item in diagram:
        if isinstance(item, Bar):
            if item.finite:
                points.append((item.birth, item.death))
        else:
            b, d = float(item[0]), float(item[1])
            if np.isfinite(d):
                points.append((b, d))
    return points


def wasserstein_h0(x: PointCloud, z: PointCloud, order: float = 1.0) -> float:
    """Wasserstein distance between the clouds' finite connectivity diagrams."""
    return wasserstein_distance(_diagram_of(x, 0), _diagram_of(z, 0), order)


def wasserstein_h1(x: PointCloud, z: PointCloud, order: float = 1.0) -> float:
    """Wasserstein distance between the clouds' cycle diagrams."""
    return wasserstein_distance(_diagram_of(x, 1), _diagram_of(z, 1), order)


def _matchable(pa, pb, threshold: float) -> bool:
    """Is there a perfect diagonal-augmented matching with all costs ≤ threshold?"""
    na, nb = len(pa), len(pb)
    rows = []
    cols = []
    arr_a = np.array(pa).reshape(na, 2)
    arr_b = np.array(pb).reshape(nb, 2)
    if na and nb:
        linf = np.abs(arr_a[:, None, :] - arr_b[None, :, :]).max(axis=2)
        ri, ci = np.nonzero(linf <= threshold)
        rows.extend(ri)
        cols.extend(ci)
    for i in range(na):
        if (arr_a[i, 1] - arr_a[i, 0]) / 2.0 <= threshold:
            rows.append(i)
            cols.append(nb + i)
    for j in range(nb):
        if (arr_b[j, 1] - arr_b[j, 0]) / 2.0 <= threshold:
            rows.append(na + j)
            cols.append(j)
    for m in range(nb):
        for k in range(na):
            rows.append(na + m)
            cols.append(nb + k)
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(na + nb, nb + na)
    )
    match = maximum_bipartite_matching(graph, perm_type="column")
    return int((match >= 0).sum()) == na + nb


def bottleneck_distance(a, b) -> float:
    """Bottleneck distance between two finite diagrams.

    Binary search over the candidate costs (all point-to-point L-inf gaps and
    all diagonal projections), checking at each threshold whether a perfect
    matching exists on the diagonal-augmented bipartite graph.
    """
    pa = _as_points(a)
    pb = _as_points(b)
    if not pa and not pb:
        return 0.0
    candidates = {0.0}
    for bb, dd in pa:
        candidates.add((dd - bb) / 2.0)
    for bb, dd in pb:
        candidates.add((dd - bb) / 2.0)
    for ba, da in pa:
        for bb, db in pb:
            candidates.add(max(abs(ba - bb), abs(da - db)))
    ordered = sorted(candidates)
    lo, hi = 0, len(ordered) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _matchable(pa, pb, ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return ordered[lo]


def bottleneck_norm(bars) -> float:
    """Bottleneck distance from a finite diagram to the empty diagram."""
    points = _as_points(bars)
    if not points:
        return 0.0
    return max((d - b) / 2.0 for b, d in points)


def _mst_pairs(weights: np.ndarray) -> list[tuple[int, int]]:
    """Kruskal spanning tree; ties broken by edge index for determinism."""
    n = weights.shape[0]
    iu, ju = np.triu_indices(n, 1)
    vals = weights[iu, ju]
    order = np.lexsort((ju, iu, vals))
    parent = list(range(n))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    picked = []
    for e in order:
        ra, rb = find(int(iu[e])), find(int(ju[e]))
        if ra != rb:
            parent[ra] = rb
            picked.append((int(iu[e]), int(ju[e])))
            if len(picked) == n - 1:
                break
    return picked


def topoae_loss(x: PointCloud, z: PointCloud) -> float:
    """Spanning-tree comparison loss: squared distance gaps over both MSTs."""
    if x.n != z.n:
        raise ValidationError("clouds must have the same number of points")
    if x.n < 2:
        raise ValidationError("spanning trees need at least two points")
    w = pairwise_distances(x).values
    wt = pairwise_distances(z).values
    total = 0.0
    for tree_source in (w, wt):
        for i, j in _mst_pairs(tree_source):
            total += 0.5 * (w[i, j] - wt[i, j]) ** 2
    return float(total)


@dataclass
class EvalReport:
    """One embedding's scorecard, JSON-serializable for run artifacts."""

    linear_correlation: float
    triplet_accuracy: float
    wd_h0: float
    rtd_metric: float
    wd_h1: float | None = None
    uncertainty: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        raw = json.loads(text)
        return cls(**raw)


def evaluate(
    x: PointCloud,
    z: PointCloud,
    num_triplets: int = 10000,
    seed: int = 0,
    include_h1: bool = False,
) -> EvalReport:
    """Full scorecard of one embedding against its source cloud.

    The cycle-diagram distance is optional because it needs the triangle
    stage of both filtrations, which grows fast with cloud size.
    """
    return EvalReport(
        linear_correlation=linear_correlation(x, z),
        triplet_accuracy=triplet_accuracy(x, z, num_triplets=num_triplets, seed=seed),
        wd_h0=wasserstein_h0(x, z),
        rtd_metric=rtd(x, z),
        wd_h1=wasserstein_h1(x, z) if include_h1 else None,
    )
