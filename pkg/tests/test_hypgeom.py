"""Graph geometry in the upper half-space model: normals, shape operators,
umbilic oracles, and the discrete normal-component identity."""

import math

import numpy as np
import pytest

from hyperplateau import hypgeom, solver
from hyperplateau.errors import DegenerateHeightError, UnsupportedSolutionError
from hyperplateau.symfunc import CurvatureSpec


class TestNormals:
    def test_flat_graph(self):
        nu, w = hypgeom.upward_normal([0.0, 0.0])
        assert w == 1.0
        assert np.allclose(nu, [0, 0, 1])

    def test_tilted(self):
        nu, w = hypgeom.upward_normal([1.0, 0.0])
        assert w == pytest.approx(math.sqrt(2))
        assert nu[-1] == pytest.approx(1 / math.sqrt(2))
        assert np.linalg.norm(nu) == pytest.approx(1.0)


class TestShapes:
    def test_horosphere(self):
        # u = const: A_hyp = I/w = I, every curvature 1
        jet = hypgeom.hyperbolic_shape(2.5, [0.0, 0.0], np.zeros((2, 2)))
        assert np.allclose(jet.kappa, 1.0, atol=1e-12)

    def test_degenerate_height(self):
        with pytest.raises(DegenerateHeightError):
            hypgeom.hyperbolic_shape(0.0, [0.0], np.zeros((1, 1)))

    def test_euclidean_sphere(self):
        # lower hemisphere graph of the unit sphere: euclidean curvature 1
        x = np.array([0.3, 0.1])
        s = math.sqrt(1 - x @ x)
        Du = x / s
        D2u = np.eye(2) / s + np.outer(x, x) / s**3
        A = hypgeom.euclidean_shape(Du, D2u)
        assert np.allclose(np.linalg.eigvalsh(A), 1.0, atol=1e-12)


class TestCapOracle:
    @pytest.mark.parametrize("sigma", [0.1, 0.5, 0.9])
    def test_umbilic(self, sigma):
        cap = hypgeom.make_cap(1.0, sigma)
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(1000):
            t = rng.uniform(0, 2 * math.pi)
            rho = rng.uniform(0, 0.999)
            jet = cap.jet([rho * math.cos(t), rho * math.sin(t)])
            worst = max(worst, np.max(np.abs(jet.kappa - sigma)))
        assert worst <= 1e-10

    def test_geometry(self):
        cap = hypgeom.make_cap(1.0, 0.5)
        assert cap.r == pytest.approx(1.0 / math.sqrt(0.75))
        assert cap.c == pytest.approx(-0.5 * cap.r)
        assert cap.apex_height == pytest.approx(math.sqrt(1.0 / 3.0))
        assert cap.height(1.0) == pytest.approx(0.0, abs=1e-12)

    def test_boundary_height_variant(self):
        for sigma in (0.2, 0.5, 0.8):
            for eps in (0.1, 1e-3):
                cap = hypgeom.make_cap_with_boundary_height(1.0, sigma, eps)
                assert cap.height(1.0) == pytest.approx(eps, abs=1e-12)
                jet = cap.jet([0.3, 0.4])
                assert np.max(np.abs(jet.kappa - sigma)) < 1e-10

    def test_higher_dimension_umbilic(self):
        cap = hypgeom.make_cap(1.0, 0.4)
        jet = cap.jet([0.2, 0.1, 0.3])
        assert np.max(np.abs(jet.kappa - 0.4)) < 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            hypgeom.make_cap(1.0, 0.0)
        with pytest.raises(ValueError):
            hypgeom.make_cap(-1.0, 0.5)


class TestRadialJet:
    def test_matches_full_jet_on_cap(self):
        cap = hypgeom.make_cap(1.0, 0.6)
        rho = 0.37
        jet_r = hypgeom.radial_jet(cap.height(rho), cap.dheight(rho),
                                   cap.d2height(rho), rho, n=2)
        jet_f = cap.jet([rho, 0.0])
        assert np.allclose(np.sort(jet_r.kappa), np.sort(jet_f.kappa), atol=1e-12)

    def test_axis_limit(self):
        cap = hypgeom.make_cap(1.0, 0.6)
        jet = hypgeom.radial_jet(cap.height(0.0), 0.0, cap.d2height(0.0), 0.0, n=3)
        assert np.allclose(jet.kappa, 0.6, atol=1e-12)

    def test_vectorized_curvatures_match(self):
        cap = hypgeom.make_cap(1.0, 0.3)
        rho = np.linspace(0.0, 0.9, 50)
        kappa, w = hypgeom.radial_principal_curvatures(
            cap.height(rho), cap.dheight(rho), cap.d2height(rho), rho, 2)
        assert np.max(np.abs(kappa - 0.3)) < 1e-10


class TestLemma21ii:
    def make_solution(self, grid_size, sigma=0.5):
        cap = hypgeom.make_cap_with_boundary_height(1.0, sigma, 1e-3)
        return solver.radial_solution_from_profile(
            CurvatureSpec.consecutive_quotient(1, 2),
            hypgeom.Domain.ball(1.0), sigma, grid_size, cap.height, 1e-3)

    def test_first_order_refinement(self):
        r512 = hypgeom.check_lemma21_ii(self.make_solution(512))
        r1024 = hypgeom.check_lemma21_ii(self.make_solution(1024))
        ratio = r1024 / r512
        assert 0.35 <= ratio <= 0.65  # halves within +-30%

    def test_requires_radial(self):
        class Fake:
            kind = "grid"
        with pytest.raises(UnsupportedSolutionError):
            hypgeom.check_lemma21_ii(Fake())


class TestDomain:
    def test_mean_convexity(self):
        assert hypgeom.Domain.ball(1.0).mean_convex
        assert hypgeom.Domain.ellipse(2.0, 1.0).mean_convex
        assert not hypgeom.Domain.annulus(0.5, 1.0).mean_convex

    def test_inscribed_radius(self):
        assert hypgeom.Domain.ellipse(2.0, 1.0).inscribed_radius == 1.0
        assert hypgeom.Domain.ball(3.0).inscribed_radius == 3.0

    def test_validation(self):
        with pytest.raises(ValueError):
            hypgeom.Domain.ellipse(1.0, 2.0)
        with pytest.raises(ValueError):
            hypgeom.Domain.annulus(2.0, 1.0)
