"""End-to-end analysis: tablecloths -> Gabriel graphs -> similarity matrix ->
consensus layout -> rendered outputs.

Both the CLI and the HTTP service call :func:`analyze`, so their SVG, matrix
CSV, and JSON outputs are produced by the same code path and are byte-equal
for the same inputs and seed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .aggregate import (
    ForceMatrix,
    MatrixStats,
    SimilarityMatrix,
    aggregate,
    force_percentages,
    matrix_stats,
    matrix_to_csv,
)
from .geometry import EdgeSet, Sheet, Tablecloth, gabriel_graph
from .layout import (
    ConsensusLayout,
    LayoutParams,
    NoConnectionsError,
    canonicalize,
    initial_positions,
    kamada_kawai,
    similarity_to_distances,
)
from .render import RenderStyle, render_consensus


@dataclass(eq=False)
class AnalysisResult:
    sample_names: list[str]
    sheet: Sheet
    graphs: list[EdgeSet]
    similarity: SimilarityMatrix
    forces: ForceMatrix
    stats: MatrixStats
    layout: ConsensusLayout
    svg: bytes
    matrix_csv: str
    percentages_csv: str

    @property
    def sample_count(self) -> int:
        return len(self.sample_names)

    @property
    def assessor_count(self) -> int:
        return self.similarity.assessor_count

    def summary(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "assessor_count": self.assessor_count,
            "zero_entries": self.stats.zero_entries,
            "max_count": self.stats.max_count,
            "max_percentage": self.stats.max_percentage,
            "final_energy": self.layout.final_energy,
            "converged": self.layout.converged,
            "iterations_used": self.layout.iterations_used,
            "informative": self.layout.informative,
        }

    def to_json_dict(self) -> dict:
        return {
            **self.summary(),
            "sample_names": list(self.sample_names),
            "positions": [[float(x), float(y)] for x, y in self.layout.positions],
            "counts": self.similarity.counts.tolist(),
            "percentages": self.forces.percentages.tolist(),
        }


def compute_gabriel_graphs(
    tablecloths: Sequence[Tablecloth], workers: int = 1
) -> list[EdgeSet]:
    """Per-tablecloth Gabriel graphs, optionally across a thread pool.

    Results are ordered like the input, so the aggregate is identical for any
    worker count."""
    if workers > 1 and len(tablecloths) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(gabriel_graph, tablecloths))
    return [gabriel_graph(t) for t in tablecloths]


def analyze(
    tablecloths: Sequence[Tablecloth],
    sample_names: Sequence[str],
    sheet: Sheet | None = None,
    params: LayoutParams | None = None,
    style: RenderStyle | None = None,
    workers: int = 1,
) -> AnalysisResult:
    if not tablecloths:
        raise ValueError("need at least one tablecloth")
    sheet = sheet or tablecloths[0].sheet
    params = params or LayoutParams(display_diameter=sheet.diagonal)
    names = list(sample_names)

    graphs = compute_gabriel_graphs(tablecloths, workers=workers)
    similarity = aggregate(graphs)
    forces = force_percentages(similarity)
    stats = matrix_stats(similarity)

    try:
        distances = similarity_to_distances(similarity)
    except NoConnectionsError:
        # No pair was ever connected: draw the samples on a plain polygon and
        # say so instead of pretending the optimizer produced information.
        positions = canonicalize(initial_positions(len(names), params))
        layout = ConsensusLayout(
            positions=positions,
            forces=forces,
            final_energy=0.0,
            iterations_used=0,
            converged=False,
            informative=False,
        )
    else:
        layout = kamada_kawai(distances, params, forces=forces)

    svg = render_consensus(layout, names, style)
    matrix_csv = matrix_to_csv(similarity.counts, names)
    percentages_csv = matrix_to_csv(forces.percentages, names)
    return AnalysisResult(
        sample_names=names,
        sheet=sheet,
        graphs=graphs,
        similarity=similarity,
        forces=forces,
        stats=stats,
        layout=layout,
        svg=svg,
        matrix_csv=matrix_csv,
        percentages_csv=percentages_csv,
    )


def summary_lines(result: AnalysisResult) -> list[str]:
    s = result.summary()
    lines = [
        f"samples:        {s['sample_count']}",
        f"assessors:      {s['assessor_count']}",
        f"zero entries:   {s['zero_entries']}",
        f"max count:      {s['max_count']} ({s['max_percentage']}%)",
        f"final energy:   {s['final_energy']:.6g}",
        f"converged:      {'yes' if s['converged'] else 'no'} "
        f"({s['iterations_used']} updates)",
    ]
    if not s["informative"]:
        lines.append("note: no connections at all; layout is a plain polygon")
    return lines
