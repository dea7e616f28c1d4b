"""Shared fixtures: published similarity matrices and frozen tablecloth files."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from napgraph import SimilarityMatrix, parse_table

FIXTURES = Path(__file__).parent / "fixtures"

# 8 red wines, 11 trained assessors.
PANEL_A_COUNTS = np.array(
    [
        [0, 4, 3, 1, 6, 3, 1, 2],
        [4, 0, 7, 6, 1, 0, 4, 4],
        [3, 7, 0, 7, 2, 2, 3, 4],
        [1, 6, 7, 0, 4, 7, 3, 1],
        [6, 1, 2, 4, 0, 3, 6, 5],
        [3, 0, 2, 7, 3, 0, 6, 4],
        [1, 4, 3, 3, 6, 6, 0, 4],
        [2, 4, 4, 1, 5, 4, 4, 0],
    ],
    dtype=np.int64,
)

# 8 wines, 12 assessors: first session and the repetition.
PANEL_B1_COUNTS = np.array(
    [
        [0, 2, 3, 5, 6, 3, 2, 4],
        [2, 0, 5, 3, 2, 4, 6, 3],
        [3, 5, 0, 1, 5, 5, 6, 5],
        [5, 3, 1, 0, 6, 3, 7, 5],
        [6, 2, 5, 6, 0, 2, 5, 2],
        [3, 4, 5, 3, 2, 0, 3, 3],
        [2, 6, 6, 7, 5, 3, 0, 3],
        [4, 3, 5, 5, 2, 3, 3, 0],
    ],
    dtype=np.int64,
)

PANEL_B2_COUNTS = np.array(
    [
        [0, 3, 1, 5, 3, 4, 3, 4],
        [3, 0, 5, 5, 7, 4, 6, 4],
        [1, 5, 0, 5, 7, 1, 3, 6],
        [5, 5, 5, 0, 1, 5, 7, 1],
        [3, 7, 7, 1, 0, 2, 4, 7],
        [4, 4, 1, 5, 2, 0, 7, 5],
        [3, 6, 3, 7, 4, 7, 0, 1],
        [4, 4, 6, 1, 7, 5, 1, 0],
    ],
    dtype=np.int64,
)

# 10 samples (one wine duplicated), 24 consumers.
PANEL_C_COUNTS = np.array(
    [
        [0, 21, 6, 6, 8, 5, 7, 4, 11, 3],
        [21, 0, 5, 2, 4, 8, 7, 4, 5, 4],
        [6, 5, 0, 10, 9, 9, 8, 10, 10, 9],
        [6, 2, 10, 0, 9, 9, 9, 10, 7, 6],
        [8, 4, 9, 9, 0, 10, 12, 10, 11, 7],
        [5, 8, 9, 9, 10, 0, 8, 7, 7, 4],
        [7, 7, 8, 9, 12, 8, 0, 8, 7, 2],
        [4, 4, 10, 10, 10, 7, 8, 0, 10, 8],
        [11, 5, 10, 7, 11, 7, 7, 10, 0, 8],
        [3, 4, 9, 6, 7, 4, 2, 8, 8, 0],
    ],
    dtype=np.int64,
)

# Aggregate of the four worked-example tablecloths, frozen from the
# brute-force oracle over tests/fixtures/worked_example_tablecloths.csv.
WORKED_EXAMPLE_COUNTS = np.array(
    [
        [0, 3, 0, 4, 0, 0, 0],
        [3, 0, 4, 2, 1, 1, 0],
        [0, 4, 0, 4, 0, 0, 4],
        [4, 2, 4, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 4, 0],
        [0, 1, 0, 0, 4, 0, 4],
        [0, 0, 4, 0, 0, 4, 0],
    ],
    dtype=np.int64,
)


@pytest.fixture
def panel_a() -> SimilarityMatrix:
    return SimilarityMatrix(PANEL_A_COUNTS, assessor_count=11)


@pytest.fixture
def panel_b1() -> SimilarityMatrix:
    return SimilarityMatrix(PANEL_B1_COUNTS, assessor_count=12)


@pytest.fixture
def panel_b2() -> SimilarityMatrix:
    return SimilarityMatrix(PANEL_B2_COUNTS, assessor_count=12)


@pytest.fixture
def panel_c() -> SimilarityMatrix:
    return SimilarityMatrix(PANEL_C_COUNTS, assessor_count=24)


@pytest.fixture
def worked_example_table():
    return parse_table((FIXTURES / "worked_example_tablecloths.csv").read_bytes())


@pytest.fixture
def panel_a_table():
    return parse_table((FIXTURES / "panel_a_tablecloths.csv").read_bytes())
