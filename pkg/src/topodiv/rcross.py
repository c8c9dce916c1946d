"""Cross-barcodes: how one cloud's topology lags behind the combined one.

Given weight matrices w and w~ on the same n points, the clique complex of w
includes into the clique complex of min(w, w~) at every threshold. The
cross-barcode in dimension k is the persistence barcode of the mapping cone
of that inclusion: its classes are combined-graph features the first cloud
has not yet produced, plus first-cloud features the combined graph has
already killed. This is the construction that makes the comparison exact
(zero barcode iff thresholds agree, a long exact sequence relating the three
complexes, and the one-point collapse identity), and it never has a dimension
0, so asking for k=0 is a contract error.

In dimension 1 the same barcode has a much cheaper encoding as a plain clique
filtration on a doubled vertex set: the first copy is glued to itself at
weight zero, the second copy carries min(w, w~), and the copies are tied
together through w with one triangular half set to +inf (each pair (i, n+i)
joined at 0). The equality of the two computations in dimension 1 is pinned
by tests; in dimensions >= 2 the doubled graph is only an approximation of
the cone (it admits mixed cliques the cone does not), so higher barcodes are
computed from the cone complex itself.

The divergence in dimension k is the total length of the barcode; the
symmetric divergence averages the two directions. An entrywise-max variant
compares the clique complex of max(w, w~) included into that of w.

In the doubled graph, simplices spanned entirely by first-copy vertices all
enter at weight 0 and form a contractible constant subcomplex; taking the
complex relative to it (the default) leaves every dimension >= 1 of the
barcode unchanged while shrinking the reduction.
"""

from __future__ import annotations

import itertools

import numpy as np

from ._reduction import negative_edge_mask, reduce_columns
from .errors import TopodivError, ValidationError
from .geometry import INF, DistanceMatrix, PointCloud, combine_min, combine_max, pairwise_distances
from .persistence import Bar

VARIANTS = ("min", "max")


def _half_masked(values: np.ndarray) -> np.ndarray:
    """Copy of a weight matrix with the strictly lower triangle set to +inf."""
    out = values.copy()
    out[np.tril_indices_from(out, k=-1)] = INF
    return out


def assemble_cross_matrix(w: DistanceMatrix, w_tilde: DistanceMatrix, variant: str = "min") -> DistanceMatrix:
    """The 2n x 2n comparison matrix of two weight matrices.

    Quadrants (first copy = indices 0..n-1, second copy = n..2n-1):
    zeros on the first copy, the half-masked glue between copies, and
    min(w, w~) (variant "min", glue from w) or w (variant "max", glue from
    max(w, w~)) on the second copy.
    """
    if variant not in VARIANTS:
        raise ValidationError(f"unknown cross matrix variant {variant!r}")
    if w.n != w_tilde.n:
        raise ValidationError(f"weight matrices must agree in size, got {w.n} and {w_tilde.n}")
    if w.n < 2:
        raise ValidationError("cross matrices need at least two points")
    n = w.n
    if variant == "min":
        glue = _half_masked(w.values)
        second = combine_min(w, w_tilde).values
    else:
        glue = _half_masked(combine_max(w, w_tilde).values)
        second = w.values
    m = np.zeros((2 * n, 2 * n))
    m[n:, :n] = glue
    m[:n, n:] = glue.T
    m[n:, n:] = second
    return DistanceMatrix(m)


def _all_triples(n: int):
    """Vertex triples a < b < c of range(n), vectorized."""
    b, c = np.triu_indices(n, 1)
    counts = b
    block_starts = np.cumsum(counts) - counts
    total = int(counts.sum())
    pair_id = np.repeat(np.arange(b.shape[0]), counts)
    a = np.arange(total) - np.repeat(block_starts, counts)
    return a.astype(np.int64), b[pair_id].astype(np.int64), c[pair_id].astype(np.int64)


def _dim1_bars(m: np.ndarray, n_first: int, exclusion: bool) -> list[Bar]:
    """Dimension-1 barcode of a cross matrix, creators and destroyers included.

    With exclusion the complex is taken relative to the first copy's span, so
    for the edge/vertex stage all first-copy vertices act as one collapsed
    basepoint. Negative edges are classified by union-find on that quotient
    graph; every cycle-creating edge must then be claimed by a triangle column
    during reduction, otherwise the barcode would contain an infinite bar,
    which the doubled construction makes impossible.
    """
    n2 = m.shape[0]
    iu, ju = np.triu_indices(n2, 1)
    evals = m[iu, ju]
    keep = np.isfinite(evals)
    if exclusion:
        keep &= ju >= n_first
    iu, ju, evals = iu[keep], ju[keep], evals[keep]
    order = np.lexsort((ju, iu, evals))
    iu, ju, evals = iu[order], ju[order], evals[order]
    n_edges = evals.shape[0]

    edge_rank = np.full((n2, n2), -1, dtype=np.int64)
    edge_rank[iu, ju] = np.arange(n_edges)

    if exclusion:
        ulab = np.where(iu < n_first, 0, iu - n_first + 1).astype(np.int64)
        vlab = np.where(ju < n_first, 0, ju - n_first + 1).astype(np.int64)
        negative = negative_edge_mask(ulab, vlab, n2 - n_first + 1)
    else:
        negative = negative_edge_mask(iu.astype(np.int64), ju.astype(np.int64), n2)
    n_positive = int(n_edges - negative.sum())

    a, b, c = _all_triples(n2)
    tvals = np.maximum(np.maximum(m[a, b], m[a, c]), m[b, c])
    tkeep = np.isfinite(tvals)
    if exclusion:
        tkeep &= c >= n_first
    a, b, c, tvals = a[tkeep], b[tkeep], c[tkeep], tvals[tkeep]
    torder = np.lexsort((c, b, a, tvals))
    a, b, c, tvals = a[torder], b[torder], c[torder], tvals[torder]

    faces = np.stack([edge_rank[a, b], edge_rank[a, c], edge_rank[b, c]], axis=1)
    faces = -np.sort(-faces, axis=1)
    pivots = reduce_columns(faces, np.zeros(faces.shape[0], dtype=np.bool_))

    paired = pivots >= 0
    if int(paired.sum()) != n_positive:
        raise TopodivError("cross matrix produced an unpaired cycle (infinite bar)")

    bars = []
    for t in np.nonzero(paired)[0]:
        e = pivots[t]
        birth = float(evals[e])
        death = float(tvals[t])
        if death > birth:
            bars.append(Bar(
                1, birth, death,
                (int(iu[e]), int(ju[e])),
                (int(a[t]), int(b[t]), int(c[t])),
            ))
    bars.sort(key=lambda bar: (bar.dim, bar.birth, bar.death, bar.birth_simplex))
    return bars


def _cone_bars(w_small: np.ndarray, w_large: np.ndarray, k: int) -> list[Bar]:
    """Degree-k barcode of the cone of VR(w_small-graph) into VR(w_large-graph).

    ``w_large <= w_small`` entrywise, so the first complex includes into the
    second at every threshold. Cone cells of degree d are the d-simplices of
    the larger complex plus the (d-1)-simplices of the smaller one shifted up;
    a shifted cell's boundary is its unshifted twin plus its shifted faces.
    Bar attributions carry the vertex tuples of the cone cells.
    """
    n = w_small.shape[0]
    # cells[d] holds (value, tag, verts) for degrees k-1, k, k+1;
    # tag 0 = simplex of the larger complex, 1 = shifted simplex of the smaller
    cells: dict[int, list[tuple[float, int, tuple[int, ...]]]] = {}
    for deg in (k - 1, k, k + 1):
        rows = []
        if deg >= 0:
            for verts in itertools.combinations(range(n), deg + 1):
                pairs = list(itertools.combinations(verts, 2))
                value = max((w_large[i][j] for i, j in pairs), default=0.0)
                if np.isfinite(value):
                    rows.append((float(value), 0, verts))
            for verts in itertools.combinations(range(n), deg):
                pairs = list(itertools.combinations(verts, 2))
                value = max((w_small[i][j] for i, j in pairs), default=0.0)
                if np.isfinite(value):
                    rows.append((float(value), 1, verts))
        rows.sort()
        cells[deg] = rows

    rank = {deg: {(tag, verts): r for r, (_, tag, verts) in enumerate(rows)} for deg, rows in cells.items()}

    def boundary_matrix(deg: int) -> np.ndarray:
        rows = cells[deg]
        below = rank[deg - 1]
        faces = np.full((len(rows), deg + 1), -1, dtype=np.int64)
        for c, (_, tag, verts) in enumerate(rows):
            j = 0
            for omit in range(len(verts)):
                face = verts[:omit] + verts[omit + 1:]
                r = below.get((tag, face))
                if r is not None:
                    faces[c, j] = r
                    j += 1
            if tag == 1:
                r = below.get((0, verts))
                if r is not None:
                    faces[c, j] = r
                    j += 1
            faces[c, :j] = -np.sort(-faces[c, :j])
        return faces

    pivots_up = reduce_columns(boundary_matrix(k + 1), np.zeros(len(cells[k + 1]), dtype=np.bool_))
    killer_of = {}
    skip = np.zeros(len(cells[k]), dtype=np.bool_)
    for c, p in enumerate(pivots_up):
        if p >= 0:
            killer_of[int(p)] = c
            skip[p] = True
    pivots_own = reduce_columns(boundary_matrix(k), skip)

    bars = []
    for r, (birth, _, verts) in enumerate(cells[k]):
        if pivots_own[r] >= 0:
            continue
        if r not in killer_of:
            raise TopodivError("cross construction produced an infinite bar")
        death, _, death_verts = cells[k + 1][killer_of[r]]
        if death > birth:
            bars.append(Bar(k, birth, death, verts, death_verts))
    bars.sort(key=lambda bar: (bar.dim, bar.birth, bar.death, bar.birth_simplex))
    return bars


def rcross_barcode_matrices(
    w: DistanceMatrix,
    w_tilde: DistanceMatrix,
    k: int = 1,
    variant: str = "min",
    exclusion: bool = True,
) -> list[Bar]:
    """Cross-barcode of dimension k straight from two weight matrices.

    Dimension 1 runs on the doubled graph (``exclusion`` picks the relative
    complex there); higher dimensions run on the cone complex, where
    ``exclusion`` has no meaning and is ignored.
    """
    if k < 1:
        raise ValidationError("cross-barcodes are defined for dimensions k >= 1 only")
    if variant not in VARIANTS:
        raise ValidationError(f"unknown cross matrix variant {variant!r}")
    if w.n != w_tilde.n:
        raise ValidationError(f"weight matrices must agree in size, got {w.n} and {w_tilde.n}")
    if w.n < 2:
        raise ValidationError("cross-barcodes need at least two points")
    if k == 1:
        m = assemble_cross_matrix(w, w_tilde, variant)
        return _dim1_bars(m.values, w.n, exclusion)
    if variant == "min":
        return _cone_bars(w.values, combine_min(w, w_tilde).values, k)
    return _cone_bars(combine_max(w, w_tilde).values, w.values, k)


def rcross_barcode(
    x: PointCloud,
    x_tilde: PointCloud,
    k: int = 1,
    variant: str = "min",
    exclusion: bool = True,
) -> list[Bar]:
    """Cross-barcode of dimension k for two aligned point clouds.

    The clouds must have the same number of points (rows correspond); their
    ambient dimensions may differ.
    """
    if x.n != x_tilde.n:
        raise ValidationError(f"clouds must have the same number of points, got {x.n} and {x_tilde.n}")
    return rcross_barcode_matrices(pairwise_distances(x), pairwise_distances(x_tilde), k, variant, exclusion)


def rtd_k(x: PointCloud, x_tilde: PointCloud, k: int = 1, variant: str = "min") -> float:
    """Total bar length of the dimension-k cross-barcode (one direction)."""
    bars = rcross_barcode(x, x_tilde, k=k, variant=variant)
    return float(sum(b.length for b in bars))


def rtd(x: PointCloud, x_tilde: PointCloud, k: int = 1, variant: str = "min") -> float:
    """Symmetrized divergence: half the sum of both directions in dimension k."""
    return 0.5 * (rtd_k(x, x_tilde, k, variant) + rtd_k(x_tilde, x, k, variant))
