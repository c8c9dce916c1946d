"""Clique filtrations and persistence barcodes over Z/2.

The filtration of a weight matrix contains every simplex whose vertices are
pairwise joined by finite-weight edges; a simplex enters at the maximum of its
pairwise weights (vertices enter at 0). Barcodes come from boundary-matrix
column reduction processed one dimension at a time from the top down, with the
clearing optimization: once a column of the (d+1)-boundary pairs with a pivot
row, that row's own column in the d-boundary is known to reduce to zero and is
never touched.

Each finite bar keeps the creator simplex (the pivot row) and the destroyer
simplex (the reduced column); infinite bars keep the creator only. Downstream
subgradient code routes derivatives through exactly these two simplices.

An optional vertex mask supports relative (quotient) filtrations: every
simplex spanned entirely by masked vertices is left out, vertices included,
and the dropped faces of surviving simplices are simply omitted from their
boundary columns. This computes homology relative to the masked span; when
that span enters complete at value 0 and is contractible, dimensions >= 1 of
the barcode agree with the unmasked filtration (callers that use the mask
never read dimension 0, which becomes relative).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ._reduction import reduce_columns
from .errors import ValidationError
from .geometry import INF, DistanceMatrix


class FilteredSimplex(NamedTuple):
    vertices: tuple[int, ...]
    dim: int
    value: float


@dataclass(frozen=True)
class Bar:
    """One interval of a persistence barcode."""

    dim: int
    birth: float
    death: float
    birth_simplex: tuple[int, ...]
    death_simplex: tuple[int, ...] | None

    @property
    def finite(self) -> bool:
        return np.isfinite(self.death)

    @property
    def length(self) -> float:
        return self.death - self.birth


def sort_key(s: FilteredSimplex):
    return (s.value, s.dim, s.vertices)


def build_filtration(
    weights: DistanceMatrix,
    max_dim: int,
    max_value: float = INF,
    exclusion_mask: np.ndarray | None = None,
) -> list[FilteredSimplex]:
    """Enumerate the clique filtration of a weight matrix.

    Simplices with a non-finite value are not part of the filtration (an
    infinite weight means the edge never appears), and ``max_value`` trims the
    filtration at a threshold. ``exclusion_mask`` is a boolean vertex mask;
    every simplex whose vertices are all masked is dropped, masked vertices
    included, giving the chain complex relative to the masked span.
    """
    if max_dim < 0:
        raise ValidationError("max_dim must be nonnegative")
    m = weights.values
    n = weights.n
    if exclusion_mask is not None:
        exclusion_mask = np.asarray(exclusion_mask, dtype=bool)
        if exclusion_mask.shape != (n,):
            raise ValidationError(f"exclusion mask must have shape ({n},)")

    if exclusion_mask is None:
        simplices = [FilteredSimplex((v,), 0, 0.0) for v in range(n)]
    else:
        simplices = [FilteredSimplex((v,), 0, 0.0) for v in range(n) if not exclusion_mask[v]]
    for d in range(1, max_dim + 1):
        for verts in itertools.combinations(range(n), d + 1):
            if exclusion_mask is not None and all(exclusion_mask[v] for v in verts):
                continue
            value = 0.0
            for i, j in itertools.combinations(verts, 2):
                w = m[i, j]
                if w > value:
                    value = w
            if np.isfinite(value) and value <= max_value:
                simplices.append(FilteredSimplex(verts, d, float(value)))
    simplices.sort(key=sort_key)
    return simplices


def compute_barcode(filtration: Sequence[FilteredSimplex], dims: Iterable[int] = (0, 1)) -> list[Bar]:
    """Persistence bars of a sorted filtration for the requested dimensions.

    The filtration must be sorted by (value, dim, vertices); anything else is
    a contract violation. Zero-length bars are dropped. To see the finite
    deaths of dimension k the filtration must go up to dimension k+1.
    """
    dims = sorted(set(int(d) for d in dims))
    if any(d < 0 for d in dims):
        raise ValidationError("barcode dimensions must be nonnegative")
    for a, b in zip(filtration, filtration[1:]):
        if sort_key(a) > sort_key(b):
            raise ValidationError("filtration is not sorted by (value, dim, vertices)")

    by_dim: dict[int, list[int]] = {}
    rank: dict[tuple[int, ...], int] = {}
    for pos, s in enumerate(filtration):
        lst = by_dim.setdefault(s.dim, [])
        rank[s.vertices] = len(lst)
        lst.append(pos)
    if not by_dim:
        return []
    top = max(by_dim)

    # destroyer pairing per dimension: creators[d][r] = column rank in dim d+1
    paired_creator: dict[int, dict[int, int]] = {d: {} for d in by_dim}
    cleared: dict[int, set[int]] = {d: set() for d in by_dim}

    for d in range(top, 0, -1):
        positions = by_dim.get(d, [])
        if not positions or (d - 1) not in by_dim:
            continue
        faces = np.full((len(positions), d + 1), -1, dtype=np.int64)
        for c, pos in enumerate(positions):
            verts = filtration[pos].vertices
            k = 0
            for omit in range(len(verts)):
                face = verts[:omit] + verts[omit + 1:]
                r = rank.get(face)
                if r is not None:
                    faces[c, k] = r
                    k += 1
            faces[c, :k] = -np.sort(-faces[c, :k])
        skip = np.zeros(len(positions), dtype=np.bool_)
        for r in cleared[d]:
            skip[r] = True
        pivots = reduce_columns(faces, skip)
        for c, p in enumerate(pivots):
            if p >= 0:
                paired_creator[d - 1][int(p)] = c
                cleared[d - 1].add(int(p))

    bars: list[Bar] = []
    for k in dims:
        positions = by_dim.get(k, [])
        pos_up = by_dim.get(k + 1, [])
        pairs = paired_creator.get(k, {})
        # a dim-k simplex is a destroyer iff it got a pivot in the dim-k pass,
        # equivalently iff it cleared a (k-1)-rank; track via cleared[k-1] inverse
        destroyer_ranks = set(paired_creator.get(k - 1, {}).values()) if k >= 1 else set()
        for r, pos in enumerate(positions):
            if r in destroyer_ranks:
                continue
            s = filtration[pos]
            if r in pairs:
                killer = filtration[pos_up[pairs[r]]]
                if killer.value > s.value:
                    bars.append(Bar(k, s.value, killer.value, s.vertices, killer.vertices))
            else:
                bars.append(Bar(k, s.value, INF, s.vertices, None))
    bars.sort(key=lambda b: (b.dim, b.birth, b.death, b.birth_simplex))
    return bars


def total_persistence(bars: Iterable[Bar], dim: int) -> float:
    """Sum of lengths of the finite bars in one dimension."""
    return float(sum(b.length for b in bars if b.dim == dim and b.finite))


def _fmt_value(x: float) -> str:
    if not np.isfinite(x):
        return "inf"
    if x == int(x):
        return str(int(x))
    return repr(float(x))


def format_barcode_csv(bars: Iterable[Bar]) -> str:
    """Serialize bars as ``dim,birth,death`` rows (death ``inf`` for infinite).

    Values print in shortest round-trip form, integral values without a
    fractional part.
    """
    lines = ["dim,birth,death"]
    for b in bars:
        lines.append(f"{b.dim},{_fmt_value(b.birth)},{_fmt_value(b.death)}")
    return "\n".join(lines) + "\n"


def parse_barcode_csv(text: str) -> list[Bar]:
    """Read bars from the CSV form; simplex attributions are not serialized."""
    rows = [line for line in text.strip().splitlines() if line]
    if not rows or rows[0].strip() != "dim,birth,death":
        raise ValidationError("barcode CSV must start with a 'dim,birth,death' header")
    bars = []
    for line in rows[1:]:
        parts = line.split(",")
        if len(parts) != 3:
            raise ValidationError(f"malformed barcode row: {line!r}")
        bars.append(Bar(int(parts[0]), float(parts[1]), float(parts[2]), (), None))
    return bars
