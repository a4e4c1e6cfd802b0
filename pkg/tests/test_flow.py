import math

import numpy as np
import pytest

import nlspec as nl


def path_graph(n, w=1.0, measure=None):
    edges = tuple((i, i + 1, w) for i in range(n - 1))
    return nl.WeightedGraph(n=n, edges=edges, node_measure=measure)


def two_node_tv():
    g = path_graph(2)
    return nl.make_functional("graph_tv", g)


class TestRunFlow:
    def test_nullspace_start_is_instant_equilibrium(self):
        g = path_graph(3)
        F = nl.make_functional("graph_tv", g)
        tr = nl.run_flow(F, np.full(3, 2.0))
        assert tr.extinction_index == 0
        assert len(tr.t) == 1
        assert np.allclose(tr.u_infinity, 2.0)

    def test_quadratic_eigenvector_recurrence(self):
        # implicit Euler on a lam=2 eigenvector: u_k = f / (1 + tau*lam)^k
        L = np.array([[1.0, -1.0], [-1.0, 1.0]])
        F = nl.make_functional("quadratic_form", matrix=L)
        f = np.array([1.0, -1.0])
        tr = nl.run_flow(F, f, tau=0.1, max_steps=30, prox_tol=1e-13,
                         store_iterates=True)
        for k, u in enumerate(tr.us):
            assert np.allclose(u, f / 1.2 ** k, atol=1e-10)

    def test_tv_eigenvector_linear_decay(self):
        F = two_node_tv()
        f = np.array([1.0, -1.0])
        lam = math.sqrt(2.0)
        tr = nl.run_flow(F, f, tau=0.1, prox_tol=1e-13)
        d0 = tr.dist[0]
        for k in range(len(tr.t)):
            assert tr.dist[k] == pytest.approx(max(d0 - lam * tr.t[k], 0.0),
                                               abs=1e-10)
        assert tr.extinction_index is not None
        t_ex = tr.t[tr.extinction_index]
        assert abs(t_ex - d0 / lam) <= 0.1 + 1e-12

    def test_update_identity(self):
        F = two_node_tv()
        tr = nl.run_flow(F, np.array([0.7, -0.3]), tau=0.05, prox_tol=1e-13,
                         store_iterates=True)
        for k in range(1, len(tr.t)):
            lhs = tr.us[k]
            rhs = tr.us[k - 1] - tr.tau[k] * tr.zetas[k]
            assert np.array_equal(lhs, rhs)

    def test_time_monotone_and_lambda_monotone(self):
        g = path_graph(5)
        F = nl.make_functional("graph_tv", g)
        f = np.array([1.0, -0.5, 0.25, 0.7, -1.3])
        tr = nl.run_flow(F, f, prox_tol=1e-12)
        assert np.all(np.diff(tr.t) > 0)
        lam = tr.Lambda[~np.isnan(tr.Lambda)]
        assert np.max(np.diff(lam)) <= 1e-6 * (1 + lam[0]) + 100 * tr.prox_gap_total

    def test_default_tau_quadratic(self):
        g = path_graph(4)
        F = nl.make_functional("quadratic_form", matrix=nl.laplacian_matrix(g))
        f = np.array([1.0, 0.0, -1.0, 0.5])
        tr = nl.run_flow(F, f, max_steps=5)
        spec = nl.dense_symmetric_eigs(nl.laplacian_matrix(g))
        assert tr.tau[1] == pytest.approx(0.1 / spec.eigenvalues[-1], rel=1e-8)

    def test_horizon_stop(self):
        g = path_graph(4)
        F = nl.make_functional("quadratic_form", matrix=nl.laplacian_matrix(g))
        tr = nl.run_flow(F, np.array([1.0, 0.0, -1.0, 0.5]), tau=0.01,
                         time_horizon=0.05, max_steps=1000)
        assert tr.t[-1] >= 0.05
        assert len(tr.t) == 6


class TestDecompose:
    def test_reconstruction(self):
        g = path_graph(4)
        F = nl.make_functional("graph_tv", g)
        f = np.array([0.9, -0.1, 0.4, -0.6])
        tr = nl.run_flow(F, f, prox_tol=1e-12)
        dec = nl.decompose(tr)
        assert dec["reconstruction_residual"] <= 1e-10 + tr.prox_gap_total

    def test_eigenvector_bands_collinear(self):
        F = two_node_tv()
        f = np.array([1.0, -1.0])
        tr = nl.run_flow(F, f, tau=0.1, prox_tol=1e-13)
        dec = nl.decompose(tr)
        for band in dec["bands"]:
            if np.linalg.norm(band) > 0:
                cos = band @ f / (np.linalg.norm(band) * np.linalg.norm(f))
                assert cos == pytest.approx(1.0, abs=1e-12)

    def test_nullspace_input(self):
        g = path_graph(3)
        F = nl.make_functional("graph_tv", g)
        tr = nl.run_flow(F, np.full(3, 1.5))
        dec = nl.decompose(tr)
        assert dec["bands"] == []
        assert np.allclose(dec["nullspace_part"], 1.5)


class TestExtinctionReport:
    def test_upper_bound_formula(self):
        F = two_node_tv()
        # dist_0 = 1 exactly: f = (1,-1)/sqrt(2)
        f = np.array([1.0, -1.0]) / math.sqrt(2.0)
        tr = nl.run_flow(F, f, tau=0.05, prox_tol=1e-13)
        rep = nl.extinction_report(tr, F, lambda1_estimate=2.0)
        assert rep["upper"] == pytest.approx(0.5)

    def test_ground_state_bounds_coincide(self):
        F = two_node_tv()
        f = np.array([1.0, -1.0])
        lam = math.sqrt(2.0)
        tr = nl.run_flow(F, f, tau=0.1, prox_tol=1e-13)
        rep = nl.extinction_report(tr, F, lambda1_estimate=lam)
        assert rep["upper"] == pytest.approx(tr.dist[0] / lam, rel=1e-12)
        assert rep["lower"] == pytest.approx(rep["upper"], rel=1e-12)
        assert rep["lower"] - 1e-10 <= rep["measured"] <= rep["upper"] + 0.1

    def test_p2_no_extinction(self):
        g = path_graph(3)
        F = nl.make_functional("quadratic_form", matrix=nl.laplacian_matrix(g))
        tr = nl.run_flow(F, np.array([1.0, 0.0, -1.0]), tau=0.1, max_steps=20)
        rep = nl.extinction_report(tr, F, lambda1_estimate=1.0)
        assert rep["measured"] is None
        assert rep["upper"] is None
        assert rep["lower"] == 0.0


class TestDecayEnvelopes:
    def test_p2_upper_envelope(self):
        g = path_graph(4)
        L = nl.laplacian_matrix(g)
        F = nl.make_functional("quadratic_form", matrix=L)
        lam1 = nl.dense_symmetric_eigs(L).eigenvalues[1]
        rng = np.random.default_rng(7)
        tr = nl.run_flow(F, rng.standard_normal(4), tau=0.05, max_steps=100)
        rep = nl.check_decay_envelopes(tr, F, lam1)
        assert rep["upper"]["worst"] >= -1e-10
        assert rep["lower"]["worst"] >= -1e-8

    def test_p1_eigenvector_hits_improved_bounds(self):
        F = two_node_tv()
        f = np.array([1.0, -1.0])
        lam = math.sqrt(2.0)
        tr = nl.run_flow(F, f, tau=0.1, prox_tol=1e-13)
        rep = nl.check_decay_envelopes(tr, F, lam)
        for name in ("upper", "lower", "improved_lower", "improved_upper"):
            assert rep[name]["worst"] >= -1e-8, name
        # the improved bounds are tight for an eigenvector evolution
        assert rep["improved_lower"]["worst"] <= 1e-6
        assert rep["improved_upper"]["worst"] <= 1e-6

    def test_zero_lambda_trivial(self):
        g = path_graph(4)
        F = nl.make_functional("graph_tv", g)
        tr = nl.run_flow(F, np.array([1.0, -0.2, 0.3, 0.1]), prox_tol=1e-12)
        rep = nl.check_decay_envelopes(tr, F, 0.0)
        assert rep["upper"]["worst"] >= 0.0

    def test_p_greater_2_envelopes(self):
        g = path_graph(3)
        F = nl.make_functional("dirichlet_p", g, p=3.0)
        f = np.array([1.0, 0.0, -1.0])
        lam1 = 0.9 * nl.rayleigh(F, f)  # any under-estimate works for upper
        tr = nl.run_flow(F, f, tau=0.05, max_steps=40, prox_tol=1e-12)
        rep = nl.check_decay_envelopes(tr, F, 0.0 + 1e-12)
        assert rep["upper"]["worst"] >= -1e-8


class TestBandEigenScores:
    def test_l1_flow_bands_certified(self):
        F = nl.make_functional("l1", n=4)
        # magnitudes are multiples of tau so every iterate keeps an exact
        # sign pattern and each zeta is a certified eigen-direction
        f = np.array([0.4, -0.2, 0.8, -0.6])
        tr = nl.run_flow(F, f, tau=0.1, prox_tol=1e-13)
        scores = nl.band_eigen_scores(tr, F)
        for cert in scores["certificates"]:
            assert cert.max_residual <= 1e-8

    def test_eigenvector_orthogonality_zero(self):
        F = two_node_tv()
        tr = nl.run_flow(F, np.array([1.0, -1.0]), tau=0.1, prox_tol=1e-13)
        scores = nl.band_eigen_scores(tr, F)
        assert scores["orthogonality_residual"] <= 1e-10

    def test_degree2_unsupported(self):
        F = nl.make_functional("quadratic_form", matrix=np.eye(2))
        tr = nl.run_flow(F, np.array([1.0, 0.0]), tau=0.1, max_steps=3)
        with pytest.raises(nl.errors.UnsupportedFunctional):
            nl.band_eigen_scores(tr, F)


class TestProfileConvergence:
    def test_eigenvector_profile_constant(self):
        F = two_node_tv()
        f = np.array([1.0, -1.0])
        tr = nl.run_flow(F, f, tau=0.1, prox_tol=1e-13, store_iterates=True)
        pc = nl.profile_convergence(tr)
        w_expected = f / nl.norm(f, F.measure)
        assert np.allclose(pc["w_last"], w_expected, atol=1e-9)
        res = pc["profile_residual_history"]
        assert np.nanmax(res[1:]) <= 1e-9

    def test_p2_profile_matches_ground_eigenvector(self):
        g = path_graph(6)
        L = nl.laplacian_matrix(g)
        F = nl.make_functional("quadratic_form", matrix=L)
        spec = nl.dense_symmetric_eigs(L)
        rng = np.random.default_rng(8)
        f = rng.standard_normal(6)
        assert abs(f @ spec.eigenvectors[:, 1]) > 1e-3
        tr = nl.run_flow(F, f, tau=0.05, max_steps=2000, time_horizon=40.0,
                         store_iterates=True)
        pc = nl.profile_convergence(tr)
        v1 = spec.eigenvectors[:, 1]
        cos = abs(pc["w_last"] @ v1) / np.linalg.norm(v1)
        assert cos >= 0.999
