"""Solver tests: residual discretization order, Newton behavior, Jacobian
cross-checks, continuation against the closed-form cap, sweeps, refinement,
and the tensor-grid path."""

import math

import numpy as np
import pytest

from hyperplateau import grid, hypgeom, solver
from hyperplateau.errors import AdmissibilityLostError
from hyperplateau.symfunc import CurvatureSpec

H1 = CurvatureSpec.consecutive_quotient(1, 2)
H2H1 = CurvatureSpec.consecutive_quotient(2, 2)


def cap_profile(grid_size, sigma, eps=0.1, R=1.0):
    rho = np.linspace(0.0, R, grid_size + 1)
    cap = hypgeom.make_cap_with_boundary_height(R, sigma, eps)
    u = cap.height(rho)
    u[-1] = eps
    return u, rho


class TestResidual:
    def test_constant_graph(self):
        u, rho = cap_profile(64, 0.5)
        u[:] = 0.7
        res = solver.residual(u, H1, 0.3, 0.7, rho)
        assert np.allclose(res[:-1], 1.0 - 0.3, atol=1e-12)

    def test_cap_discretization_order(self):
        norms = []
        for N in (128, 256, 512):
            u, rho = cap_profile(N, 0.6)
            res = solver.residual(u, H2H1, 0.6, 0.1, rho)
            norms.append(np.max(np.abs(res)))
        assert norms[0] / norms[1] == pytest.approx(4.0, rel=0.3)
        assert norms[1] / norms[2] == pytest.approx(4.0, rel=0.3)

    def test_admissibility_error_carries_nodes(self):
        u, rho = cap_profile(64, 0.5)
        u[10] = -0.5
        with pytest.raises(AdmissibilityLostError) as exc:
            solver.residual(u, H1, 0.5, 0.1, rho)
        assert 10 in exc.value.nodes


class TestNewton:
    def config(self, **kw):
        return solver.SolverConfig(spec=H2H1, domain=hypgeom.Domain.ball(1.0),
                                   sigma_target=0.5, **kw).resolved()

    def test_quadratic_convergence_probe(self):
        u, rho = cap_profile(128, 0.6)
        # smooth perturbation: rough noise would be amplified by the 1/h^2
        # stencil into the nonlinear regime where one step cannot finish
        u[:-1] += 1e-6 * np.sin(math.pi * rho[:-1])
        cfg = self.config()
        base = np.max(np.abs(solver.residual(u, H2H1, 0.6, 0.1, rho)))
        u2, _, norm = solver.newton_step(u, H2H1, 0.6, 0.1, rho, cfg)
        assert norm <= base / 100.0

    def test_fixed_point(self):
        cfg = self.config()
        sol = solver.continuation_solve(self.config(grid_size=128))
        u, step, norm = solver.newton_step(sol.u, H2H1, 0.5, sol.epsilon,
                                           sol.rho, cfg)
        assert step <= 1e-8

    def test_jacobian_cross_check_17_nodes(self):
        u, rho = cap_profile(16, 0.6)
        ab_fd = solver._jacobian_fd(u, H2H1, rho, 2)
        ab_an = solver._jacobian_analytic(u, H2H1, 0.6, 0.1, rho, 2)
        scale = np.max(np.abs(ab_an))
        assert np.max(np.abs(ab_fd - ab_an)) / scale < 1e-4

    def test_jacobian_cross_check_fine_grid(self):
        u, rho = cap_profile(512, 0.8)
        ab_fd = solver._jacobian_fd(u, H2H1, rho, 2)
        ab_an = solver._jacobian_analytic(u, H2H1, 0.8, 0.1, rho, 2)
        scale = np.max(np.abs(ab_an))
        assert np.max(np.abs(ab_fd - ab_an)) / scale < 1e-6


class TestContinuation:
    def test_h1_cap_oracle(self):
        cfg = solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ball(1.0),
                                  sigma_target=0.5, grid_size=512)
        sol = solver.continuation_solve(cfg)
        exact = math.sqrt(1.0 / 3.0)
        assert abs(sol.u0 - exact) < 1e-3
        assert sol.report.converged
        assert sol.report.final_residual <= 1e-10
        assert sol.report.admissibility_violations == 0

    def test_near_one_sigma(self):
        cfg = solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ball(1.0),
                                  sigma_target=0.95, grid_size=512)
        sol = solver.continuation_solve(cfg)
        exact = math.sqrt(0.05 / 1.95)
        assert abs(sol.u0 - exact) < 1e-3

    def test_richardson_extrapolation(self):
        cfg = solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ball(1.0),
                                  sigma_target=0.5, grid_size=512)
        val, info = solver.solve_with_epsilon_extrapolation(cfg)
        assert abs(val - math.sqrt(1.0 / 3.0)) < 1e-4
        assert 0.8 <= info["order"] <= 1.3

    def test_interior_jets_admissible(self):
        cfg = solver.SolverConfig(spec=H2H1, domain=hypgeom.Domain.ball(1.0),
                                  sigma_target=0.3, grid_size=128)
        sol = solver.continuation_solve(cfg)
        for i in (0, 40, 100, 127):
            jet = sol.interior_jet(i)
            assert np.max(np.abs(jet.kappa - np.sort(sol.kappa[i])[::-1])) < 1e-8

    def test_analytic_jacobian_mode_agrees(self):
        kw = dict(spec=H2H1, domain=hypgeom.Domain.ball(1.0),
                  sigma_target=0.4, grid_size=256)
        s1 = solver.continuation_solve(solver.SolverConfig(**kw))
        s2 = solver.continuation_solve(
            solver.SolverConfig(jacobian_mode="analytic_Fij", **kw))
        assert abs(s1.u0 - s2.u0) < 1e-9


class TestSweep:
    def test_h1_oracle_rows(self):
        cfg = solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ball(1.0),
                                  sigma_target=0.9, grid_size=512)
        sigmas = [0.9, 0.7, 0.5, 0.3, 0.2, 0.1]
        rows = solver.sweep_sigma(cfg, sigmas)
        for row in rows:
            exact = math.sqrt((1 - row["sigma"]) / (1 + row["sigma"]))
            assert row["converged"]
            assert abs(row["u0"] - exact) < 1e-3
            assert abs(row["kappa_max"] - row["sigma"]) < 1e-3
            assert row["min_nu_vertical"] >= row["sigma"] - 0.01
            assert row["below_sigma0"] == (row["sigma"] < 0.3703)

    def test_requires_descending(self):
        cfg = solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ball(1.0),
                                  sigma_target=0.5)
        with pytest.raises(ValueError):
            solver.sweep_sigma(cfg, [0.2, 0.5])

    def test_warm_matches_cold(self):
        cfg = solver.SolverConfig(spec=H2H1, domain=hypgeom.Domain.ball(1.0),
                                  sigma_target=0.6, grid_size=128)
        rows = solver.sweep_sigma(cfg, [0.6, 0.5])
        cold = solver.continuation_solve(
            solver.SolverConfig(spec=H2H1, domain=hypgeom.Domain.ball(1.0),
                                sigma_target=0.5, grid_size=128))
        warm_row = rows[1]
        assert abs(warm_row["u0"] - cold.u0) < 1e-8


class TestRefine:
    def test_observed_order(self):
        cfg = solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ball(1.0),
                                  sigma_target=0.5, grid_size=128)
        study = solver.refine_study(cfg, 3)
        assert all(r["converged"] for r in study["rows"])
        assert 1.7 <= study["observed_order"] <= 2.3
        assert study["kappa_max_drift"] <= 0.01

    def test_minimum_levels(self):
        cfg = solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ball(1.0),
                                  sigma_target=0.5)
        with pytest.raises(ValueError):
            solver.refine_study(cfg, 1)


class TestSchedules:
    def test_epsilon_default(self):
        sched = solver.default_epsilon_schedule()
        assert sched[0] == 0.1 and sched[-1] == 1e-3
        assert all(b < a for a, b in zip(sched, sched[1:]))

    def test_sigma_default(self):
        sched = solver.default_sigma_schedule(0.2)
        assert sched[0] == 0.8 and sched[-1] == 0.2
        assert all(b < a for a, b in zip(sched, sched[1:]))

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ball(1.0),
                                sigma_target=1.5).resolved()
        with pytest.raises(ValueError):
            solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ball(1.0),
                                sigma_target=0.5,
                                epsilon_schedule=(1e-3, 1e-2)).resolved()


class TestGridPath:
    def test_circle_matches_cap(self):
        cfg = solver.SolverConfig(spec=H1, domain=hypgeom.Domain.ellipse(1.0, 1.0),
                                  sigma_target=0.5, grid_size=64)
        sol = solver.continuation_solve(cfg)
        exact = math.sqrt(1.0 / 3.0)
        assert sol.kind == "grid"
        assert abs(sol.u0 - exact) < 2e-2  # staircase boundary is first order
        assert sol.report.final_residual <= 1e-8

    def test_ellipse_solve(self):
        cfg = solver.SolverConfig(spec=H2H1, domain=hypgeom.Domain.ellipse(1.3, 0.9),
                                  sigma_target=0.4, grid_size=48)
        sol = solver.continuation_solve(cfg)
        assert sol.report.converged
        assert np.min(sol.u) > 0.0
        assert sol.report.min_nu_vertical >= 0.4 - 0.05

    def test_grid_curvatures_match_pointwise(self):
        # closed-form 2x2 eigenvalues against the per-point jet constructor
        rng = np.random.default_rng(3)
        for _ in range(50):
            u = rng.uniform(0.2, 2.0)
            Du = rng.normal(size=2)
            M = rng.normal(size=(2, 2))
            D2u = 0.5 * (M + M.T)
            kappa, w = grid.principal_curvatures_2d(
                u, Du[0], Du[1], D2u[0, 0], D2u[1, 1], D2u[0, 1])
            jet = hypgeom.hyperbolic_shape(u, Du, D2u)
            assert np.allclose(np.sort(kappa), np.sort(jet.kappa), atol=1e-10)
