"""Tablecloth geometry: Delaunay triangulation and Gabriel graph extraction.

A tablecloth is one assessor's placement of all samples on a sheet.  Two
samples P and Q are Gabriel-connected when no third sample lies inside the
closed disk whose diameter is the segment P-Q.  A third sample exactly on the
bounding circle therefore blocks the edge (the disk is closed), which is why
the right-angle vertex of a right triangle kills the hypotenuse.

The production path filters Delaunay edges, since every Gabriel edge is a
Delaunay edge.  Disk tests that a floating-point filter cannot decide are
re-evaluated with exact rational arithmetic, so boundary ties are resolved
deterministically with no epsilon.  Degenerate inputs (fewer than 3 points,
coincident samples, all samples collinear) skip the triangulation entirely
and use the brute-force path, which applies the closed-disk definition to
every pair and doubles as the test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.spatial import Delaunay as _SciPyDelaunay
from scipy.spatial import QhullError

from . import accel


class DegenerateInputError(ValueError):
    """Raised when a triangulation is requested for fewer than 3 points."""


@dataclass(frozen=True)
class Sheet:
    """Physical sheet the samples are placed on, in cm."""

    width: float = 60.0
    height: float = 40.0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("sheet dimensions must be positive")

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)


DEFAULT_SHEET = Sheet(60.0, 40.0)


@dataclass(eq=False)
class Tablecloth:
    """One assessor's sample positions, measured in cm from the bottom-left
    corner of the sheet (y grows upward)."""

    assessor_id: str
    sheet: Sheet
    positions: np.ndarray  # (S, 2) float64

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError("positions must be an (S, 2) array")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        self.positions = pos

    @property
    def sample_count(self) -> int:
        return self.positions.shape[0]

    def out_of_sheet_indices(self) -> list[int]:
        """Indices of samples placed outside the sheet bounds."""
        x, y = self.positions[:, 0], self.positions[:, 1]
        bad = (x < 0) | (y < 0) | (x > self.sheet.width) | (y > self.sheet.height)
        return [int(i) for i in np.nonzero(bad)[0]]

    def coincident_pairs(self) -> list[tuple[int, int]]:
        """Pairs of samples at exactly identical positions."""
        seen: dict[tuple[float, float], int] = {}
        pairs = []
        for i, (x, y) in enumerate(self.positions):
            key = (float(x), float(y))
            if key in seen:
                pairs.append((seen[key], i))
            else:
                seen[key] = i
        return pairs

    def __eq__(self, other):
        if not isinstance(other, Tablecloth):
            return NotImplemented
        return (
            self.assessor_id == other.assessor_id
            and self.sheet == other.sheet
            and np.array_equal(self.positions, other.positions)
        )


@dataclass(frozen=True)
class EdgeSet:
    """Undirected edges over sample indices; pairs are stored as (i, j), i < j."""

    sample_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < j < self.sample_count):
                raise ValueError(f"edge ({i}, {j}) out of range for S={self.sample_count}")

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, pair) -> bool:
        i, j = pair
        return (min(i, j), max(i, j)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.sample_count, self.sample_count), dtype=np.int64)
        for i, j in self.edges:
            adj[i, j] = adj[j, i] = 1
        return adj


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("expected an (S, 2) array of points")
    return pts


def _exact_dot_sign(p, q, r) -> int:
    """Sign of (p - r) . (q - r), computed exactly from the float inputs.

    Negative or zero means r lies inside or on the circle with diameter p-q."""
    px, py = Fraction(float(p[0])), Fraction(float(p[1]))
    qx, qy = Fraction(float(q[0])), Fraction(float(q[1]))
    rx, ry = Fraction(float(r[0])), Fraction(float(r[1]))
    dot = (px - rx) * (qx - rx) + (py - ry) * (qy - ry)
    if dot > 0:
        return 1
    if dot < 0:
        return -1
    return 0


def _exact_orient_sign(a, b, c) -> int:
    """Sign of the cross product (b - a) x (c - a), exact on the float inputs."""
    ax, ay = Fraction(float(a[0])), Fraction(float(a[1]))
    bx, by = Fraction(float(b[0])), Fraction(float(b[1]))
    cx, cy = Fraction(float(c[0])), Fraction(float(c[1]))
    cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if cross > 0:
        return 1
    if cross < 0:
        return -1
    return 0


def all_collinear(points) -> bool:
    """True when every point lies on one line (exact test)."""
    pts = _as_points(points)
    n = pts.shape[0]
    if n < 3:
        return True
    # anchor on the first pair of distinct points
    base = None
    for i in range(1, n):
        if pts[i, 0] != pts[0, 0] or pts[i, 1] != pts[0, 1]:
            base = i
            break
    if base is None:
        return True  # all coincident
    for k in range(1, n):
        if k == base:
            continue
        if _exact_orient_sign(pts[0], pts[base], pts[k]) != 0:
            return False
    return True


def delaunay(points) -> set[tuple[int, int, int]]:
    """Delaunay triangulation as a set of index triples (each sorted).

    Requires at least 3 points.  A fully collinear input yields the empty
    set; callers fall back to the brute-force Gabriel path for that case.
    """
    pts = _as_points(points)
    if pts.shape[0] < 3:
        raise DegenerateInputError("need at least 3 points to triangulate")
    if all_collinear(pts):
        return set()
    try:
        tri = _SciPyDelaunay(pts)
    except QhullError:
        return set()
    return {tuple(sorted(int(v) for v in simplex)) for simplex in tri.simplices}


def triangulation_edges(triangles: Iterable[tuple[int, int, int]]) -> set[tuple[int, int]]:
    edges = set()
    for a, b, c in triangles:
        edges.add((min(a, b), max(a, b)))
        edges.add((min(a, c), max(a, c)))
        edges.add((min(b, c), max(b, c)))
    return edges


def _gabriel_filter_exact(pts: np.ndarray, i: int, j: int) -> bool:
    """Closed-disk test for one candidate edge with exact arithmetic."""
    for k in range(pts.shape[0]):
        if k == i or k == j:
            continue
        if _exact_dot_sign(pts[i], pts[j], pts[k]) <= 0:
            return False
    return True


def gabriel_edges_from_points(points, kernels: accel.KernelSet | None = None) -> frozenset[tuple[int, int]]:
    """Gabriel edges for a raw point array (the fast, Delaunay-filtered path)."""
    pts = _as_points(points)
    n = pts.shape[0]
    if n <= 1:
        return frozenset()
    if n == 2:
        return frozenset({(0, 1)})
    if len({(float(x), float(y)) for x, y in pts}) < n or all_collinear(pts):
        return _bruteforce_edges(pts)
    triangles = delaunay(pts)
    if not triangles:
        return _bruteforce_edges(pts)
    used = {v for tri in triangles for v in tri}
    if len(used) < n:
        # Qhull may drop near-duplicate points; the filter would then never
        # see their edges, so use the exhaustive path instead.
        return _bruteforce_edges(pts)
    cand = np.array(sorted(triangulation_edges(triangles)), dtype=np.int64)
    kern = kernels if kernels is not None else accel.get_kernels()
    status = kern.gabriel_filter(pts, cand)
    kept = []
    for (i, j), verdict in zip(cand, status):
        if verdict == 1:
            kept.append((int(i), int(j)))
        elif verdict == accel.UNCERTAIN and _gabriel_filter_exact(pts, int(i), int(j)):
            kept.append((int(i), int(j)))
    return frozenset(kept)


def gabriel_graph(tablecloth: Tablecloth, kernels: accel.KernelSet | None = None) -> EdgeSet:
    """Gabriel graph of one tablecloth (Delaunay-filtered, exact on ties)."""
    edges = gabriel_edges_from_points(tablecloth.positions, kernels=kernels)
    return EdgeSet(tablecloth.sample_count, edges)


def _bruteforce_edges(pts: np.ndarray) -> frozenset[tuple[int, int]]:
    n = pts.shape[0]
    fr = [(Fraction(float(x)), Fraction(float(y))) for x, y in pts]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            blocked = False
            for k in range(n):
                if k == i or k == j:
                    continue
                dot = (fr[i][0] - fr[k][0]) * (fr[j][0] - fr[k][0]) + (
                    fr[i][1] - fr[k][1]
                ) * (fr[j][1] - fr[k][1])
                if dot <= 0:
                    blocked = True
                    break
            if not blocked:
                edges.append((i, j))
    return frozenset(edges)


def gabriel_bruteforce(tablecloth: Tablecloth) -> EdgeSet:
    """O(S^3) Gabriel graph straight from the definition, in exact rational
    arithmetic.  Serves as the oracle for the fast path and as the fallback
    for degenerate inputs."""
    return EdgeSet(tablecloth.sample_count, _bruteforce_edges(tablecloth.positions))
