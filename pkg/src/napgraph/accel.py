"""Numeric kernels, each with a numba-compiled and a pure-numpy implementation.

The numba path is selected automatically when numba imports cleanly; setting
the environment variable ``NAPGRAPH_NUMBA`` to ``0``/``false``/``off`` before
import forces the numpy fallback.  ``get_kernels("numba")`` /
``get_kernels("numpy")`` return a specific implementation regardless of the
flag, which is what the benchmark uses to compare the two paths.

Kernels:

- ``gabriel_filter``: classify candidate edges with the diametral-disk test,
  using a floating-point filter that flags sign-uncertain cases instead of
  guessing (callers re-check those with exact arithmetic).
- ``kk_energy`` / ``kk_gradients`` / ``kk_node_derivatives``: spring-energy
  terms for the Kamada-Kawai solver.
- ``floyd_warshall``: in-place all-pairs shortest paths on a dense matrix.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Unit roundoff is eps/2; the factor 16 makes the filter band conservative, so
# that any dot product whose sign could be wrong lands in the "uncertain" bin.
FILTER_EPS = 16.0 * float(np.finfo(np.float64).eps)

UNCERTAIN = 2  # gabriel_filter status: 0 rejected, 1 kept, 2 needs exact check


def _gabriel_filter_loops(points, cand):
    n = points.shape[0]
    ne = cand.shape[0]
    status = np.empty(ne, dtype=np.int8)
    for e in range(ne):
        i = cand[e, 0]
        j = cand[e, 1]
        verdict = np.int8(1)
        for k in range(n):
            if k == i or k == j:
                continue
            t1 = (points[i, 0] - points[k, 0]) * (points[j, 0] - points[k, 0])
            t2 = (points[i, 1] - points[k, 1]) * (points[j, 1] - points[k, 1])
            dot = t1 + t2
            err = FILTER_EPS * (abs(t1) + abs(t2))
            if dot < -err:
                verdict = np.int8(0)
                break
            if dot <= err:
                verdict = np.int8(2)
        status[e] = verdict
    return status


def _gabriel_filter_numpy(points, cand):
    if cand.shape[0] == 0:
        return np.empty(0, dtype=np.int8)
    pi = points[cand[:, 0]]  # (E, 2)
    pj = points[cand[:, 1]]
    t1 = (pi[:, None, 0] - points[None, :, 0]) * (pj[:, None, 0] - points[None, :, 0])
    t2 = (pi[:, None, 1] - points[None, :, 1]) * (pj[:, None, 1] - points[None, :, 1])
    dot = t1 + t2  # (E, S)
    err = FILTER_EPS * (np.abs(t1) + np.abs(t2))
    endpoint = np.zeros(dot.shape, dtype=bool)
    rows = np.arange(cand.shape[0])
    endpoint[rows, cand[:, 0]] = True
    endpoint[rows, cand[:, 1]] = True
    blocked = (dot < -err) & ~endpoint
    uncertain = (dot <= err) & ~(dot < -err) & ~endpoint
    status = np.ones(cand.shape[0], dtype=np.int8)
    status[uncertain.any(axis=1)] = UNCERTAIN
    status[blocked.any(axis=1)] = 0
    return status


def _kk_energy_loops(pos, lengths, strengths):
    n = pos.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            r = np.sqrt(dx * dx + dy * dy)
            diff = r - lengths[i, j]
            total += 0.5 * strengths[i, j] * diff * diff
    return total


def _kk_energy_numpy(pos, lengths, strengths):
    delta = pos[:, None, :] - pos[None, :, :]
    r = np.hypot(delta[:, :, 0], delta[:, :, 1])
    diff = r - lengths
    iu = np.triu_indices(pos.shape[0], k=1)
    return float(np.sum(0.5 * strengths[iu] * diff[iu] ** 2))


def _kk_gradients_loops(pos, lengths, strengths):
    n = pos.shape[0]
    grads = np.zeros((n, 2))
    for i in range(n):
        gx = 0.0
        gy = 0.0
        for j in range(n):
            if j == i:
                continue
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            r = np.sqrt(dx * dx + dy * dy)
            if r <= 0.0:
                continue  # coincident nodes exert no defined direction
            c = strengths[i, j] * (1.0 - lengths[i, j] / r)
            gx += c * dx
            gy += c * dy
        grads[i, 0] = gx
        grads[i, 1] = gy
    return grads


def _kk_gradients_numpy(pos, lengths, strengths):
    delta = pos[:, None, :] - pos[None, :, :]
    r = np.hypot(delta[:, :, 0], delta[:, :, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = strengths * (1.0 - lengths / r)
    coef[~np.isfinite(coef)] = 0.0
    return np.sum(coef[:, :, None] * delta, axis=1)


def _kk_node_derivatives_loops(pos, lengths, strengths, m):
    n = pos.shape[0]
    gx = 0.0
    gy = 0.0
    hxx = 0.0
    hxy = 0.0
    hyy = 0.0
    for j in range(n):
        if j == m:
            continue
        dx = pos[m, 0] - pos[j, 0]
        dy = pos[m, 1] - pos[j, 1]
        r2 = dx * dx + dy * dy
        r = np.sqrt(r2)
        if r <= 0.0:
            continue
        k = strengths[m, j]
        l = lengths[m, j]
        r3 = r2 * r
        gx += k * dx * (1.0 - l / r)
        gy += k * dy * (1.0 - l / r)
        hxx += k * (1.0 - l * dy * dy / r3)
        hxy += k * (l * dx * dy / r3)
        hyy += k * (1.0 - l * dx * dx / r3)
    return gx, gy, hxx, hxy, hyy


def _kk_node_derivatives_numpy(pos, lengths, strengths, m):
    delta = pos[m] - pos
    dx = np.delete(delta[:, 0], m)
    dy = np.delete(delta[:, 1], m)
    k = np.delete(strengths[m], m)
    l = np.delete(lengths[m], m)
    r2 = dx * dx + dy * dy
    r = np.sqrt(r2)
    ok = r > 0.0
    dx, dy, k, l, r2, r = dx[ok], dy[ok], k[ok], l[ok], r2[ok], r[ok]
    r3 = r2 * r
    gx = float(np.sum(k * dx * (1.0 - l / r)))
    gy = float(np.sum(k * dy * (1.0 - l / r)))
    hxx = float(np.sum(k * (1.0 - l * dy * dy / r3)))
    hxy = float(np.sum(k * (l * dx * dy / r3)))
    hyy = float(np.sum(k * (1.0 - l * dx * dx / r3)))
    return gx, gy, hxx, hxy, hyy


def _floyd_warshall_loops(d):
    n = d.shape[0]
    for k in range(n):
        for i in range(n):
            dik = d[i, k]
            for j in range(n):
                alt = dik + d[k, j]
                if alt < d[i, j]:
                    d[i, j] = alt
    return d


def _floyd_warshall_numpy(d):
    n = d.shape[0]
    for k in range(n):
        np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :], out=d)
    return d


@dataclass(frozen=True)
class KernelSet:
    name: str
    gabriel_filter: Callable
    kk_energy: Callable
    kk_gradients: Callable
    kk_node_derivatives: Callable
    floyd_warshall: Callable


NUMPY_KERNELS = KernelSet(
    name="numpy",
    gabriel_filter=_gabriel_filter_numpy,
    kk_energy=_kk_energy_numpy,
    kk_gradients=_kk_gradients_numpy,
    kk_node_derivatives=_kk_node_derivatives_numpy,
    floyd_warshall=_floyd_warshall_numpy,
)

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    HAVE_NUMBA = False

if HAVE_NUMBA:
    NUMBA_KERNELS = KernelSet(
        name="numba",
        gabriel_filter=njit(cache=True)(_gabriel_filter_loops),
        kk_energy=njit(cache=True)(_kk_energy_loops),
        kk_gradients=njit(cache=True)(_kk_gradients_loops),
        kk_node_derivatives=njit(cache=True)(_kk_node_derivatives_loops),
        floyd_warshall=njit(cache=True)(_floyd_warshall_loops),
    )
else:  # pragma: no cover
    NUMBA_KERNELS = None


def _flag_enabled() -> bool:
    value = os.environ.get("NAPGRAPH_NUMBA", "1").strip().lower()
    return value not in ("0", "false", "no", "off")


_ACTIVE = NUMBA_KERNELS if (HAVE_NUMBA and _flag_enabled()) else NUMPY_KERNELS


def get_kernels(impl: str | None = None) -> KernelSet:
    """Return a kernel set: the active one, or a named one ("numba"/"numpy")."""
    if impl is None:
        return _ACTIVE
    if impl == "numpy":
        return NUMPY_KERNELS
    if impl == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not available in this environment")
        return NUMBA_KERNELS
    raise ValueError(f"unknown kernel implementation {impl!r}")


def active_impl() -> str:
    return _ACTIVE.name


def warm_up(impl: str | None = None) -> None:
    """Trigger JIT compilation so timings exclude compile cost."""
    kernels = get_kernels(impl)
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    cand = np.array([[0, 1], [0, 2], [1, 2]], dtype=np.int64)
    kernels.gabriel_filter(pts, cand)
    lengths = np.ones((3, 3)) - np.eye(3)
    strengths = np.ones((3, 3)) - np.eye(3)
    kernels.kk_energy(pts, lengths, strengths)
    kernels.kk_gradients(pts, lengths, strengths)
    kernels.kk_node_derivatives(pts, lengths, strengths, 0)
    kernels.floyd_warshall(np.where(np.eye(3) > 0, 0.0, 1.0))
