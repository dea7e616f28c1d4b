"""Kamada-Kawai consensus layout over the similarity graph.

Connection counts are turned into graph distances (more agreement -> shorter
edge), all-pairs shortest paths give the target distance d_ij for every pair,
and the spring energy

    E = sum_{i<j} 1/2 * k_ij * (|p_i - p_j| - l_ij)^2

with l_ij = L * d_ij, L = display_diameter / max d, and k_ij = K / d_ij^2 is
minimized by repeatedly applying a 2x2 Newton update to the node with the
largest gradient.  Every accepted update strictly decreases E (steps are
backtracked until they do), so the energy trace is non-increasing by
construction.  The final energy is reported as the fit index of the drawing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import accel
from .aggregate import ForceMatrix, SimilarityMatrix
from .geometry import DEFAULT_SHEET

DEFAULT_DISPLAY_DIAMETER = DEFAULT_SHEET.diagonal  # sqrt(60^2 + 40^2) cm

# Relative determinant threshold below which the 2x2 Newton system counts as
# singular and a plain gradient step of length L/100 is used instead.
_SINGULAR_REL = 1e-12


class NoConnectionsError(ValueError):
    """Raised when the similarity matrix has no nonzero entry at all."""


class DisconnectedSamplesWarning(UserWarning):
    """Some sample pairs have no connecting path; pseudo-distances are used."""


@dataclass(frozen=True)
class LayoutParams:
    spring_constant: float = 100.0  # K: scales every spring strength
    max_updates: int = 1000  # C: total single-node Newton updates allowed
    tolerance: float = 0.1  # epsilon: gradient-norm stopping threshold
    display_diameter: float = DEFAULT_DISPLAY_DIAMETER  # L0: target drawing size
    seed: int | None = None  # None -> deterministic polygon start, no jitter

    def __post_init__(self):
        if not self.spring_constant > 0:
            raise ValueError("spring_constant must be positive")
        if self.max_updates < 1:
            raise ValueError("max_updates must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.display_diameter > 0:
            raise ValueError("display_diameter must be positive")


class IterationRecord(NamedTuple):
    iteration: int
    node: int
    gradient_norm: float  # norm that selected the node, before the update
    energy: float  # total energy after the update


@dataclass(eq=False)
class ConsensusLayout:
    positions: np.ndarray  # (S, 2), canonicalized
    forces: ForceMatrix | None
    final_energy: float
    iterations_used: int
    converged: bool
    informative: bool = True
    trace: list[IterationRecord] = field(default_factory=list)


def similarity_to_distances(m: SimilarityMatrix) -> np.ndarray:
    """Graph-distance matrix derived from connection counts.

    Each counted connection becomes an edge of length (A + 1 - c) / (A + 1),
    so unanimous pairs are short but never zero-length; distances are the
    all-pairs shortest paths over those edges.  Pairs left unreachable get
    1.5x the largest finite distance (with a warning).  A matrix with no
    connections at all raises NoConnectionsError.
    """
    n = m.sample_count
    if n < 2:
        raise ValueError("need at least 2 samples")
    a = m.assessor_count
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    connected = m.counts > 0
    d[connected] = (a + 1 - m.counts[connected]) / (a + 1)
    if not connected.any():
        raise NoConnectionsError("similarity matrix has no connections")
    accel.get_kernels().floyd_warshall(d)
    unreachable = ~np.isfinite(d)
    if unreachable.any():
        finite_max = d[np.isfinite(d)].max()
        d[unreachable] = 1.5 * finite_max
        pairs = int(np.count_nonzero(np.triu(unreachable, k=1)))
        warnings.warn(
            f"{pairs} sample pair(s) have no connecting path; "
            "placing them at 1.5x the largest finite distance",
            DisconnectedSamplesWarning,
            stacklevel=2,
        )
    return d


def initial_positions(n: int, params: LayoutParams) -> np.ndarray:
    """Regular polygon of radius L0/2 in index order, plus optional seeded
    jitter (magnitude L0/1000) to escape symmetric saddle points."""
    radius = params.display_diameter / 2.0
    angles = 2.0 * np.pi * np.arange(n) / n
    pos = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
    if params.seed is not None:
        rng = np.random.default_rng(params.seed)
        pos += rng.uniform(-1.0, 1.0, size=pos.shape) * (params.display_diameter / 1000.0)
    return pos


def _spring_matrices(d: np.ndarray, params: LayoutParams) -> tuple[np.ndarray, np.ndarray]:
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    off = ~np.eye(n, dtype=bool)
    scale = params.display_diameter / d[off].max()
    lengths = scale * d
    strengths = np.zeros_like(d)
    strengths[off] = params.spring_constant / d[off] ** 2
    return lengths, strengths


def _validate_distances(d: np.ndarray) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 2:
        raise ValueError("distance matrix must be square with at least 2 rows")
    if not np.all(np.isfinite(d)):
        raise ValueError("distances must be finite")
    if not np.allclose(d, d.T):
        raise ValueError("distances must be symmetric")
    if np.any(np.diag(d) != 0):
        raise ValueError("distance diagonal must be zero")
    off = d[~np.eye(d.shape[0], dtype=bool)]
    if np.any(off <= 0):
        raise ValueError("off-diagonal distances must be positive")
    return d


def layout_energy(positions, d, params: LayoutParams | None = None) -> float:
    """Spring energy of the given positions against target distances."""
    params = params or LayoutParams()
    d = _validate_distances(d)
    pos = np.asarray(positions, dtype=np.float64)
    if pos.shape != (d.shape[0], 2):
        raise ValueError("positions shape must be (S, 2)")
    lengths, strengths = _spring_matrices(d, params)
    return float(accel.get_kernels().kk_energy(pos, lengths, strengths))


def _node_step(kernels, pos, lengths, strengths, m, grad_step):
    """Proposed displacement for node m: Newton when the 2x2 system is usable,
    otherwise a gradient step of fixed length."""
    gx, gy, hxx, hxy, hyy = kernels.kk_node_derivatives(pos, lengths, strengths, m)
    gnorm = math.hypot(gx, gy)
    if gnorm == 0.0:
        return None
    det = hxx * hyy - hxy * hxy
    tr = hxx + hyy
    use_gradient = not math.isfinite(det) or abs(det) < _SINGULAR_REL * tr * tr
    if not use_gradient:
        dx = (-gx * hyy + gy * hxy) / det
        dy = (-gy * hxx + gx * hxy) / det
        if dx * gx + dy * gy >= 0.0:  # not a descent direction
            use_gradient = True
    if use_gradient:
        dx = -gx / gnorm * grad_step
        dy = -gy / gnorm * grad_step
    return dx, dy


def _accept_step(kernels, pos, lengths, strengths, m, step, energy):
    """Backtrack the step until total energy strictly decreases.

    Returns the new energy, or None when no decreasing step exists."""
    dx, dy = step
    old = pos[m].copy()
    t = 1.0
    for _ in range(40):
        pos[m, 0] = old[0] + t * dx
        pos[m, 1] = old[1] + t * dy
        new_energy = kernels.kk_energy(pos, lengths, strengths)
        if new_energy < energy:
            return float(new_energy)
        t *= 0.5
    pos[m] = old
    return None


def canonicalize(positions: np.ndarray) -> np.ndarray:
    """Deterministic pose: centroid at origin, principal axis along +x, and
    the first sample on or above the x-axis."""
    pos = np.asarray(positions, dtype=np.float64).copy()
    pos -= pos.mean(axis=0)
    sxx = float(np.sum(pos[:, 0] ** 2))
    syy = float(np.sum(pos[:, 1] ** 2))
    sxy = float(np.sum(pos[:, 0] * pos[:, 1]))
    if sxy != 0.0 or sxx != syy:
        theta = 0.5 * math.atan2(2.0 * sxy, sxx - syy)
        c, s = math.cos(theta), math.sin(theta)
        pos = pos @ np.array([[c, -s], [s, c]])
    if pos.shape[0] > 0 and pos[0, 1] < 0:
        pos[:, 1] = -pos[:, 1]
    return pos


def kamada_kawai(
    d,
    params: LayoutParams | None = None,
    forces: ForceMatrix | None = None,
    kernels: accel.KernelSet | None = None,
) -> ConsensusLayout:
    """Minimize the spring energy by single-node Newton updates.

    The node with the largest gradient norm is polished until its norm drops
    below the tolerance, then the next worst node is selected, until either
    every node is below tolerance (converged) or the update budget runs out.
    One iteration is one accepted update of one node.
    """
    params = params or LayoutParams()
    d = _validate_distances(d)
    n = d.shape[0]
    kern = kernels if kernels is not None else accel.get_kernels()
    lengths, strengths = _spring_matrices(d, params)
    grad_step = params.display_diameter / (100.0 * d.max())  # L / 100
    pos = initial_positions(n, params)

    energy = float(kern.kk_energy(pos, lengths, strengths))
    iterations = 0
    trace: list[IterationRecord] = []
    converged = False
    stalled = False

    while iterations < params.max_updates:
        grads = kern.kk_gradients(pos, lengths, strengths)
        norms = np.hypot(grads[:, 0], grads[:, 1])
        m = int(np.argmax(norms))
        if norms[m] < params.tolerance:
            converged = True
            break
        progressed = False
        node_norm = float(norms[m])
        while node_norm >= params.tolerance and iterations < params.max_updates:
            step = _node_step(kern, pos, lengths, strengths, m, grad_step)
            if step is None:
                break
            new_energy = _accept_step(kern, pos, lengths, strengths, m, step, energy)
            if new_energy is None:
                break
            assert new_energy < energy  # descent-only acceptance
            energy = new_energy
            iterations += 1
            trace.append(IterationRecord(iterations, m, node_norm, energy))
            progressed = True
            gx, gy, *_ = kern.kk_node_derivatives(pos, lengths, strengths, m)
            node_norm = math.hypot(gx, gy)
        if not progressed:
            # The worst node cannot be improved; nothing else will change it.
            stalled = True
            break

    if not converged and not stalled and iterations >= params.max_updates:
        grads = kern.kk_gradients(pos, lengths, strengths)
        converged = bool(np.hypot(grads[:, 0], grads[:, 1]).max() < params.tolerance)

    pos = canonicalize(pos)
    final_energy = float(kern.kk_energy(pos, lengths, strengths))
    return ConsensusLayout(
        positions=pos,
        forces=forces,
        final_energy=final_energy,
        iterations_used=iterations,
        converged=converged,
        trace=trace,
    )
