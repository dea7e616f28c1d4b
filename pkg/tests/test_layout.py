"""Distance derivation and Kamada-Kawai solver behavior."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.optimize import minimize

from napgraph import (
    LayoutParams,
    NoConnectionsError,
    SimilarityMatrix,
    kamada_kawai,
    layout_energy,
    similarity_to_distances,
)
from napgraph.accel import get_kernels
from napgraph.layout import (
    DisconnectedSamplesWarning,
    _node_step,
    _spring_matrices,
    canonicalize,
    initial_positions,
)


def sim(counts, a):
    return SimilarityMatrix(np.array(counts, dtype=np.int64), assessor_count=a)


class TestSimilarityToDistances:
    def test_two_samples_unanimous(self):
        d = similarity_to_distances(sim([[0, 4], [4, 0]], 4))
        assert d[0, 1] == pytest.approx(1 / 5)

    def test_two_hop_path(self):
        counts = [[0, 2, 0], [2, 0, 2], [0, 2, 0]]
        d = similarity_to_distances(sim(counts, 2))
        assert d[0, 1] == pytest.approx(1 / 3)
        assert d[0, 2] == pytest.approx(2 / 3)  # via the middle sample

    def test_panel_a_all_finite(self, panel_a):
        d = similarity_to_distances(panel_a)
        assert np.all(np.isfinite(d))
        off = d[~np.eye(8, dtype=bool)]
        assert np.all(off > 0)

    def test_disconnected_pairs_get_pseudo_distance(self):
        counts = np.zeros((4, 4), dtype=np.int64)
        counts[0, 1] = counts[1, 0] = 3
        counts[2, 3] = counts[3, 2] = 1
        with pytest.warns(DisconnectedSamplesWarning):
            d = similarity_to_distances(sim(counts, 3))
        finite_max = max(d[0, 1], d[2, 3])
        assert d[0, 2] == pytest.approx(1.5 * finite_max)

    def test_all_zero_raises(self):
        with pytest.raises(NoConnectionsError):
            similarity_to_distances(sim(np.zeros((3, 3), dtype=int), 2))

    def test_shorter_when_more_agreement(self):
        counts = [[0, 9, 1], [9, 0, 5], [1, 5, 0]]
        d = similarity_to_distances(sim(counts, 9))
        assert d[0, 1] < d[1, 2] < d[0, 2]


def random_distance_matrix(rng, n):
    m = rng.uniform(0.3, 2.0, size=(n, n))
    d = (m + m.T) / 2
    np.fill_diagonal(d, 0.0)
    # metric enough for the solver: it only needs symmetric positive entries
    return d


class TestGradients:
    def test_analytic_matches_finite_differences(self):
        rng = np.random.default_rng(17)
        kernels = get_kernels()
        params = LayoutParams()
        for _ in range(25):
            n = int(rng.integers(3, 9))
            d = random_distance_matrix(rng, n)
            lengths, strengths = _spring_matrices(d, params)
            pos = rng.uniform(-40, 40, size=(n, 2))
            grads = kernels.kk_gradients(pos, lengths, strengths)
            h = 1e-5
            for m in range(n):
                for axis in range(2):
                    bumped = pos.copy()
                    bumped[m, axis] += h
                    e_plus = kernels.kk_energy(bumped, lengths, strengths)
                    bumped[m, axis] -= 2 * h
                    e_minus = kernels.kk_energy(bumped, lengths, strengths)
                    fd = (e_plus - e_minus) / (2 * h)
                    assert grads[m, axis] == pytest.approx(fd, rel=1e-5, abs=1e-6)

    def test_node_derivatives_match_full_gradient(self):
        rng = np.random.default_rng(23)
        kernels = get_kernels()
        d = random_distance_matrix(rng, 6)
        lengths, strengths = _spring_matrices(d, LayoutParams())
        pos = rng.uniform(-30, 30, size=(6, 2))
        grads = kernels.kk_gradients(pos, lengths, strengths)
        for m in range(6):
            gx, gy, *_ = kernels.kk_node_derivatives(pos, lengths, strengths, m)
            assert (gx, gy) == pytest.approx((grads[m, 0], grads[m, 1]))


class TestEquilibria:
    def test_two_nodes_reach_spring_length(self):
        d = np.array([[0.0, 0.7], [0.7, 0.0]])
        params = LayoutParams()
        layout = kamada_kawai(d, params)
        target = params.display_diameter  # l = L * d with L = L0 / max d
        dist = np.linalg.norm(layout.positions[0] - layout.positions[1])
        assert abs(dist - target) / target < 0.01
        assert layout.converged

    def test_three_equal_distances_equilateral(self):
        d = np.ones((3, 3)) - np.eye(3)
        layout = kamada_kawai(d, LayoutParams())
        p = layout.positions
        sides = sorted(
            np.linalg.norm(p[i] - p[j]) for i, j in [(0, 1), (1, 2), (0, 2)]
        )
        assert sides[-1] / sides[0] < 1.01
        assert layout.converged

    def test_equilateral_agrees_with_independent_minimizer(self):
        d = np.ones((3, 3)) - np.eye(3)
        params = LayoutParams()
        layout = kamada_kawai(d, params)

        def objective(flat):
            return layout_energy(flat.reshape(3, 2), d, params)

        rng = np.random.default_rng(0)
        best = math.inf
        for _ in range(5):
            x0 = rng.uniform(-params.display_diameter, params.display_diameter, 6)
            res = minimize(objective, x0, method="Nelder-Mead",
                           options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 5000})
            best = min(best, res.fun)
        assert layout.final_energy <= best + 1e-3 * max(1.0, abs(best))

    def test_energy_zero_at_exact_spring_length(self):
        d = np.array([[0.0, 0.7], [0.7, 0.0]])
        params = LayoutParams()
        target = params.display_diameter  # the single spring's rest length
        pos = np.array([[0.0, 0.0], [target, 0.0]])
        assert layout_energy(pos, d, params) == pytest.approx(0.0, abs=1e-18)

    def test_energy_of_coincident_pair(self):
        d = np.array([[0.0, 0.7], [0.7, 0.0]])
        params = LayoutParams()
        pos = np.zeros((2, 2))
        k = params.spring_constant / 0.7**2
        expected = 0.5 * k * params.display_diameter**2
        assert layout_energy(pos, d, params) == pytest.approx(expected, rel=1e-12)

    def test_local_minimum_under_perturbation(self, panel_a):
        d = similarity_to_distances(panel_a)
        params = LayoutParams()
        layout = kamada_kawai(d, params)
        rng = np.random.default_rng(100)
        base = layout_energy(layout.positions, d, params)
        for _ in range(20):
            bump = rng.normal(0, 0.05, size=layout.positions.shape)
            assert layout_energy(layout.positions + bump, d, params) > base


class TestDescentAndTrace:
    def test_energy_trace_non_increasing(self, panel_a):
        d = similarity_to_distances(panel_a)
        layout = kamada_kawai(d, LayoutParams())
        energies = [rec.energy for rec in layout.trace]
        assert len(energies) == layout.iterations_used
        assert all(b < a for a, b in zip(energies, energies[1:]))

    def test_trace_records_selected_nodes(self, panel_c):
        d = similarity_to_distances(panel_c)
        layout = kamada_kawai(d, LayoutParams())
        assert {rec.node for rec in layout.trace} <= set(range(10))
        assert [rec.iteration for rec in layout.trace] == list(
            range(1, layout.iterations_used + 1)
        )

    def test_budget_respected_and_flag_honest(self, panel_a):
        d = similarity_to_distances(panel_a)
        params = LayoutParams(max_updates=3)
        layout = kamada_kawai(d, params)
        assert layout.iterations_used <= 3
        assert not layout.converged
        full = kamada_kawai(d, LayoutParams())
        assert full.converged
        lengths, strengths = _spring_matrices(d, LayoutParams())
        grads = get_kernels().kk_gradients(full.positions, lengths, strengths)
        assert np.hypot(grads[:, 0], grads[:, 1]).max() < LayoutParams().tolerance


class TestDeterminismAndGauge:
    def test_same_seed_bit_identical(self, panel_c):
        d = similarity_to_distances(panel_c)
        a = kamada_kawai(d, LayoutParams(seed=7))
        b = kamada_kawai(d, LayoutParams(seed=7))
        assert np.array_equal(a.positions, b.positions)
        assert a.final_energy == b.final_energy
        assert a.iterations_used == b.iterations_used

    def test_no_seed_also_deterministic(self, panel_a):
        d = similarity_to_distances(panel_a)
        a = kamada_kawai(d, LayoutParams())
        b = kamada_kawai(d, LayoutParams())
        assert np.array_equal(a.positions, b.positions)

    def test_energy_invariant_under_rigid_motion(self, panel_a):
        d = similarity_to_distances(panel_a)
        params = LayoutParams()
        layout = kamada_kawai(d, params)
        base = layout_energy(layout.positions, d, params)
        rng = np.random.default_rng(5)
        for _ in range(10):
            theta = rng.uniform(0, 2 * math.pi)
            c, s = math.cos(theta), math.sin(theta)
            rot = np.array([[c, -s], [s, c]])
            moved = layout.positions @ rot.T + rng.uniform(-100, 100, 2)
            assert layout_energy(moved, d, params) == pytest.approx(base, rel=1e-9)

    def test_canonical_pose(self, panel_a):
        d = similarity_to_distances(panel_a)
        layout = kamada_kawai(d, LayoutParams())
        pos = layout.positions
        assert np.allclose(pos.mean(axis=0), 0, atol=1e-9)
        assert pos[0, 1] >= 0
        # principal axis along x: cross moment vanishes
        assert abs(float(np.sum(pos[:, 0] * pos[:, 1]))) < 1e-6 * float(np.sum(pos**2))

    def test_canonicalize_fixes_reflection(self):
        pts = np.array([[0.0, -3.0], [2.0, 1.0], [-2.0, 2.0]])
        out = canonicalize(pts)
        assert out[0, 1] >= 0


class StubKernels:
    """Minimal kernel double for exercising the Newton fallback paths."""

    def __init__(self, gx, gy, hxx, hxy, hyy):
        self.values = (gx, gy, hxx, hxy, hyy)

    def kk_node_derivatives(self, pos, lengths, strengths, m):
        return self.values


class TestNodeStepFallbacks:
    def test_zero_gradient_returns_none(self):
        kern = StubKernels(0.0, 0.0, 1.0, 0.0, 1.0)
        assert _node_step(kern, None, None, None, 0, grad_step=0.5) is None

    def test_singular_hessian_takes_gradient_step(self):
        kern = StubKernels(3.0, 4.0, 1.0, 1.0, 1.0)  # det == 0
        dx, dy = _node_step(kern, None, None, None, 0, grad_step=0.5)
        assert (dx, dy) == pytest.approx((-0.3, -0.4))  # -g/|g| * step

    def test_ascent_newton_direction_replaced(self):
        # indefinite hessian whose newton step points uphill
        kern = StubKernels(1.0, 0.0, -1.0, 0.0, 1.0)
        dx, dy = _node_step(kern, None, None, None, 0, grad_step=0.25)
        assert (dx, dy) == pytest.approx((-0.25, 0.0))

    def test_solver_never_aborts_on_rough_inputs(self):
        rng = np.random.default_rng(31)
        d = random_distance_matrix(rng, 7)
        d[0, 1] = d[1, 0] = 1e-4  # extreme stiffness ratio
        layout = kamada_kawai(d, LayoutParams(max_updates=300))
        assert np.all(np.isfinite(layout.positions))
        assert np.isfinite(layout.final_energy)


class TestParamsValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"spring_constant": 0},
            {"max_updates": 0},
            {"tolerance": 0},
            {"display_diameter": -1},
        ],
    )
    def test_rejects_bad_params(self, kwargs):
        with pytest.raises(ValueError):
            LayoutParams(**kwargs)

    def test_initial_positions_polygon(self):
        params = LayoutParams()
        pos = initial_positions(4, params)
        radii = np.linalg.norm(pos, axis=1)
        assert np.allclose(radii, params.display_diameter / 2)

    def test_seeded_jitter_is_small_and_reproducible(self):
        params = LayoutParams(seed=4)
        a = initial_positions(5, params)
        b = initial_positions(5, params)
        assert np.array_equal(a, b)
        clean = initial_positions(5, LayoutParams())
        assert np.abs(a - clean).max() <= params.display_diameter / 1000
