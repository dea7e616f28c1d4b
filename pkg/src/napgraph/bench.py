"""Scaling benchmark: wall time per phase as the assessor count grows.

Gabriel extraction and aggregation both do work proportional to the number of
tablecloths, so doubling the assessors should roughly double their combined
time; the layout phase only sees the aggregated matrix, so its time depends
on the sample count alone.  Synthetic tablecloths are uniform random
placements from a seeded generator.  The kernel implementation (numba vs
numpy) can be pinned to compare the two paths.

The layout phase runs with a fixed update budget (and an unreachable
tolerance) so that every measurement performs identical work: how many
updates a particular random matrix happens to need before converging is a
property of that matrix, not of the assessor count, and letting it vary
would drown the scaling signal being measured.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

import numpy as np

from . import accel
from .aggregate import aggregate
from .geometry import DEFAULT_SHEET, Sheet, Tablecloth, gabriel_graph
from .layout import LayoutParams, kamada_kawai, similarity_to_distances


def random_tablecloths(
    sample_count: int, assessor_count: int, seed: int, sheet: Sheet | None = None
) -> list[Tablecloth]:
    sheet = sheet or DEFAULT_SHEET
    rng = np.random.default_rng(seed)
    cloths = []
    for a in range(assessor_count):
        positions = rng.uniform(0.0, 1.0, size=(sample_count, 2)) * (
            sheet.width,
            sheet.height,
        )
        cloths.append(Tablecloth(assessor_id=f"a{a:04d}", sheet=sheet, positions=positions))
    return cloths


@dataclass(frozen=True)
class PhaseTimes:
    assessor_count: int
    gabriel: float
    aggregate: float
    layout: float

    @property
    def collect(self) -> float:
        """Gabriel + aggregation: the part that scales with assessors."""
        return self.gabriel + self.aggregate


@dataclass(frozen=True)
class BenchReport:
    sample_count: int
    repeats: int
    impl: str
    rows: list[PhaseTimes]  # medians per assessor count


# Every benchmark layout run performs exactly this many node updates.
LAYOUT_BUDGET = 200

# Matrices per assessor count over which one layout measurement is averaged.
LAYOUT_ENSEMBLE = 20


def run_benchmark(
    sample_count: int,
    assessor_counts: list[int],
    repeats: int = 5,
    seed: int = 0,
    impl: str | None = None,
) -> BenchReport:
    kernels = accel.get_kernels(impl)
    accel.warm_up(impl)

    # Collection phases: one dataset per (assessor count, repeat), timed with
    # repeats interleaved across sizes so machine-speed drift during the run
    # hits every assessor count alike instead of skewing the ratios.  The
    # aggregated distance matrices are kept for the layout phase.
    gabriel_times: dict[int, list[float]] = {a: [] for a in assessor_counts}
    aggregate_times: dict[int, list[float]] = {a: [] for a in assessor_counts}
    dmats: dict[int, list] = {a: [] for a in assessor_counts}
    warmed = False
    for r in range(repeats):
        for a in assessor_counts:
            cloths = random_tablecloths(sample_count, a, seed + 7919 * r + a)
            if not warmed:  # untimed pass warms caches and the allocator
                [gabriel_graph(t, kernels=kernels) for t in cloths[:32]]
                warmed = True
            t0 = time.perf_counter()
            graphs = [gabriel_graph(t, kernels=kernels) for t in cloths]
            t1 = time.perf_counter()
            similarity = aggregate(graphs)
            t2 = time.perf_counter()
            gabriel_times[a].append(t1 - t0)
            aggregate_times[a].append(t2 - t1)
            dmats[a].append(similarity_to_distances(similarity))

    # Layout phase: each measurement times a whole ensemble of matrices for
    # one assessor count, every run pinned to the same update budget.  The
    # ensemble averages out per-matrix differences in step-acceptance cost,
    # which depend on the random matrix drawn, not on the assessor count, so
    # extra matrices are generated (untimed) until each ensemble has
    # LAYOUT_ENSEMBLE members.
    params = LayoutParams(max_updates=LAYOUT_BUDGET, tolerance=1e-6)
    for a in assessor_counts:
        extra = 0
        while len(dmats[a]) < LAYOUT_ENSEMBLE:
            cloths = random_tablecloths(sample_count, a, seed + 104729 + 31 * extra + a)
            graphs = [gabriel_graph(t, kernels=kernels) for t in cloths]
            dmats[a].append(similarity_to_distances(aggregate(graphs)))
            extra += 1
    layout_times: dict[int, list[float]] = {a: [] for a in assessor_counts}
    for a in assessor_counts:  # untimed warm pass
        kamada_kawai(dmats[a][0], params, kernels=kernels)
    for r in range(repeats):
        for a in assessor_counts:
            t0 = time.perf_counter()
            for d in dmats[a]:
                kamada_kawai(d, params, kernels=kernels)
            layout_times[a].append((time.perf_counter() - t0) / len(dmats[a]))

    rows = [
        PhaseTimes(
            assessor_count=a,
            gabriel=statistics.median(gabriel_times[a]),
            aggregate=statistics.median(aggregate_times[a]),
            layout=statistics.median(layout_times[a]),
        )
        for a in assessor_counts
    ]
    return BenchReport(
        sample_count=sample_count, repeats=repeats, impl=kernels.name, rows=rows
    )


def format_report(report: BenchReport) -> str:
    lines = [
        f"samples={report.sample_count} repeats={report.repeats} "
        f"kernels={report.impl} (median wall time, seconds)",
        f"{'assessors':>9}  {'gabriel':>10}  {'aggregate':>10}  {'layout':>10}",
    ]
    for row in report.rows:
        lines.append(
            f"{row.assessor_count:>9}  {row.gabriel:>10.4f}  "
            f"{row.aggregate:>10.4f}  {row.layout:>10.4f}"
        )
    for prev, cur in zip(report.rows, report.rows[1:]):
        factor = cur.assessor_count / prev.assessor_count
        collect_ratio = cur.collect / prev.collect if prev.collect > 0 else float("nan")
        layout_ratio = cur.layout / prev.layout if prev.layout > 0 else float("nan")
        lines.append(
            f"A x{factor:g} ({prev.assessor_count}->{cur.assessor_count}): "
            f"gabriel+aggregate ratio {collect_ratio:.2f}, layout ratio {layout_ratio:.2f}"
        )
    return "\n".join(lines)
