"""Edge-count aggregation across tablecloths and derived force percentages.

The similarity matrix counts, for every pair of samples, how many tablecloths
connect them.  Forces are those counts normalized by the number of assessors;
percentage labels round half up so 21 of 24 reads as 88%.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import EdgeSet


@dataclass(frozen=True)
class SimilarityMatrix:
    counts: np.ndarray  # (S, S) int64, symmetric, zero diagonal
    assessor_count: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError("counts must be a square matrix")
        if not np.array_equal(counts, counts.T):
            raise ValueError("counts must be symmetric")
        if np.any(np.diag(counts) != 0):
            raise ValueError("diagonal must be zero")
        if self.assessor_count < 1:
            raise ValueError("assessor_count must be >= 1")
        if counts.min() < 0 or counts.max() > self.assessor_count:
            raise ValueError("counts must lie in [0, assessor_count]")
        object.__setattr__(self, "counts", counts)

    @property
    def sample_count(self) -> int:
        return self.counts.shape[0]


@dataclass(frozen=True)
class ForceMatrix:
    forces: np.ndarray  # (S, S) float64 in [0, 1]
    percentages: np.ndarray  # (S, S) int64, round-half-up of 100 * force
    assessor_count: int

    @property
    def sample_count(self) -> int:
        return self.forces.shape[0]


@dataclass(frozen=True)
class MatrixStats:
    zero_entries: int
    max_count: int
    max_percentage: int


def aggregate(graphs: Sequence[EdgeSet], assessor_count: int | None = None) -> SimilarityMatrix:
    """Sum edge occurrences over all tablecloth graphs.

    All graphs must share the same sample count; a mismatch is reported with
    the index of the offending tablecloth.
    """
    if len(graphs) == 0:
        raise ValueError("need at least one tablecloth graph")
    if assessor_count is None:
        assessor_count = len(graphs)
    elif assessor_count != len(graphs):
        raise ValueError(
            f"assessor_count={assessor_count} does not match {len(graphs)} graphs"
        )
    n = graphs[0].sample_count
    for idx, g in enumerate(graphs):
        if g.sample_count != n:
            raise ValueError(
                f"tablecloth {idx} has {g.sample_count} samples, expected {n}"
            )
    counts = np.zeros((n, n), dtype=np.int64)
    for g in graphs:
        for i, j in g.edges:
            counts[i, j] += 1
            counts[j, i] += 1
    return SimilarityMatrix(counts, assessor_count)


def round_half_up_percent(count: int, assessor_count: int) -> int:
    """Integer percent of count/assessor_count, rounding .5 upward (exact)."""
    return (200 * count + assessor_count) // (2 * assessor_count)


def force_percentages(m: SimilarityMatrix) -> ForceMatrix:
    """Normalized forces plus integer percentage labels."""
    a = m.assessor_count
    forces = m.counts / a
    percentages = (200 * m.counts + a) // (2 * a)
    return ForceMatrix(forces, percentages.astype(np.int64), a)


def matrix_stats(m: SimilarityMatrix) -> MatrixStats:
    """Zero-entry count, maximum count, and maximum percentage over the
    strict upper triangle."""
    iu = np.triu_indices(m.sample_count, k=1)
    upper = m.counts[iu]
    zero_entries = int(np.sum(upper == 0))
    max_count = int(upper.max()) if upper.size else 0
    return MatrixStats(
        zero_entries=zero_entries,
        max_count=max_count,
        max_percentage=round_half_up_percent(max_count, m.assessor_count),
    )


def matrix_to_csv(values: np.ndarray, sample_names: Sequence[str]) -> str:
    """Render a square integer matrix as CSV with sample names on both axes.

    The diagonal is written as 0."""
    values = np.asarray(values)
    n = values.shape[0]
    if len(sample_names) != n:
        raise ValueError("sample_names length must match matrix size")
    lines = ["sample," + ",".join(sample_names)]
    for i in range(n):
        row = [sample_names[i]] + [str(int(values[i, j])) for j in range(n)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
