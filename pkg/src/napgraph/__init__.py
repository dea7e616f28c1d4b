"""Consensus graphics for projective-mapping (napping) tasting data.

Pipeline: per-tablecloth Gabriel graphs -> global similarity matrix ->
Kamada-Kawai consensus layout -> force-encoded SVG, plus a CSV table format,
a session store, an HTTP collection service, and a scaling benchmark.
"""

from .aggregate import (
    ForceMatrix,
    MatrixStats,
    SimilarityMatrix,
    aggregate,
    force_percentages,
    matrix_stats,
    matrix_to_csv,
)
from .geometry import (
    DEFAULT_SHEET,
    DegenerateInputError,
    EdgeSet,
    Sheet,
    Tablecloth,
    delaunay,
    gabriel_bruteforce,
    gabriel_graph,
)
from .layout import (
    ConsensusLayout,
    DisconnectedSamplesWarning,
    LayoutParams,
    NoConnectionsError,
    kamada_kawai,
    layout_energy,
    similarity_to_distances,
)
from .pipeline import AnalysisResult, analyze
from .render import RenderStyle, render_consensus, render_tablecloth
from .sessions import Session, SessionStore
from .tableio import (
    CoordinateTable,
    OutOfSheetWarning,
    ParseError,
    parse_table,
    table_to_tablecloths,
    tablecloths_to_table,
    write_table,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "ConsensusLayout",
    "CoordinateTable",
    "DEFAULT_SHEET",
    "DegenerateInputError",
    "DisconnectedSamplesWarning",
    "EdgeSet",
    "ForceMatrix",
    "LayoutParams",
    "MatrixStats",
    "NoConnectionsError",
    "OutOfSheetWarning",
    "ParseError",
    "RenderStyle",
    "Session",
    "SessionStore",
    "Sheet",
    "SimilarityMatrix",
    "Tablecloth",
    "aggregate",
    "analyze",
    "delaunay",
    "force_percentages",
    "gabriel_bruteforce",
    "gabriel_graph",
    "kamada_kawai",
    "layout_energy",
    "matrix_stats",
    "matrix_to_csv",
    "parse_table",
    "render_consensus",
    "render_tablecloth",
    "similarity_to_distances",
    "table_to_tablecloths",
    "tablecloths_to_table",
    "write_table",
]
