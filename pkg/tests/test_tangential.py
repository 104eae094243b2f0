import numpy as np
import pytest

from surfcr.errors import NotOnSurface
from surfcr.level_surface import GenericLevelSet, Sphere, Torus
from surfcr.tangential import (TangentialFieldSpec, bochner_laplacian, exact_solution,
                               exact_with_jacobian, manufactured_rhs, rotation_spec,
                               sphere_spec, tangential_gradient, torus_spec, zero_spec)

from oracles import fd_bochner_laplacian, fd_covariant_gradient, surface_field

SPECS = [sphere_spec(), torus_spec()]


def tangential_residual(v, n):
    return np.max(np.abs(np.sum(v * n, axis=-1)))


def test_exact_solution_is_tangential():
    for spec in SPECS:
        y = spec.surface.sample(500, np.random.default_rng(0))
        n = spec.surface.closest_point(y).normal
        u = exact_solution(spec, y)
        assert tangential_residual(u, n) < 1e-13
        np.testing.assert_allclose(u, surface_field(spec)(y), atol=1e-15)
        u2, du = exact_with_jacobian(spec, y)
        np.testing.assert_allclose(u2, u, atol=1e-15)
        assert du.shape == (500, 3, 3)


class TestTangentialGradient:
    def test_constant_ambient_field_is_tangential(self):
        spec = TangentialFieldSpec(Sphere(), lambda x1, x2, x3: (1.0 + 0 * x1, 0 * x1, 0 * x1))
        y = np.array([0.0, 0.0, 1.0])
        G = tangential_gradient(spec, y)
        P = np.diag([1.0, 1.0, 0.0])
        np.testing.assert_allclose(P @ G @ P, G, atol=1e-12)
        # on the unit sphere grad n = P, hence grad_G (P w) = -(n . w) P for constant w
        y = Sphere().sample(50, np.random.default_rng(0))
        cp = Sphere().closest_point(y)
        expected = -cp.position[:, 0, None, None] * cp.projector
        np.testing.assert_allclose(tangential_gradient(spec, y), expected, atol=1e-14)

    def test_sphere_point_matches_fd(self):
        y = np.array([[1.0, 0.0, 0.0]])
        G = tangential_gradient(sphere_spec(), y)
        np.testing.assert_allclose(G, fd_covariant_gradient(sphere_spec(), y), atol=1e-6)

    def test_zero_field(self):
        y = Torus().sample(10, np.random.default_rng(1))
        np.testing.assert_array_equal(tangential_gradient(zero_spec(Torus()), y), 0.0)

    @pytest.mark.parametrize("spec", SPECS, ids=["sphere", "torus"])
    def test_random_points(self, spec):
        y = spec.surface.sample(200, np.random.default_rng(2))
        G = tangential_gradient(spec, y)
        assert np.max(np.abs(G - fd_covariant_gradient(spec, y))) < 1e-6
        P = spec.surface.closest_point(y).projector
        assert np.max(np.abs(P @ G @ P - G)) < 1e-12


class TestBochnerLaplacian:
    def test_zero_field(self):
        y = Sphere().sample(5, np.random.default_rng(0))
        np.testing.assert_array_equal(bochner_laplacian(zero_spec(Sphere()), y), 0.0)
        np.testing.assert_array_equal(manufactured_rhs(zero_spec(Sphere()), y), 0.0)

    def test_killing_field_is_eigenfield(self):
        spec = rotation_spec()
        lap = bochner_laplacian(spec, np.array([1.0, 0.0, 0.0]))
        np.testing.assert_allclose(lap, [0.0, -1.0, 0.0], atol=1e-14)
        y = spec.surface.sample(300, np.random.default_rng(3))
        y = y[np.abs(y[:, 2]) < 0.99]
        u = exact_solution(spec, y)
        np.testing.assert_allclose(bochner_laplacian(spec, y), -u, atol=1e-13)
        assert np.max(np.abs(bochner_laplacian(spec, y) - fd_bochner_laplacian(spec, y))) < 1e-5

    def test_killing_field_rhs(self):
        spec = rotation_spec(mass_coefficient=1.0)
        y = spec.surface.sample(100, np.random.default_rng(4))
        np.testing.assert_allclose(manufactured_rhs(spec, y), 2 * exact_solution(spec, y),
                                   atol=1e-13)

    def test_torus_outer_equator(self):
        y = np.array([[1.5, 0.0, 0.0]])
        lap = bochner_laplacian(torus_spec(), y)
        np.testing.assert_allclose(lap, fd_bochner_laplacian(torus_spec(), y), atol=1e-5)

    def test_sphere_rhs_example(self):
        spec = sphere_spec(0.1)
        y = np.array([[0.0, 1.0, 0.0]])
        f_fd = -fd_bochner_laplacian(spec, y) + 0.1 * surface_field(spec)(y)
        np.testing.assert_allclose(manufactured_rhs(spec, y), f_fd, atol=1e-5)

    @pytest.mark.parametrize("spec", SPECS, ids=["sphere", "torus"])
    def test_tangential_outputs(self, spec):
        y = spec.surface.sample(500, np.random.default_rng(5))
        n = spec.surface.closest_point(y).normal
        assert tangential_residual(bochner_laplacian(spec, y), n) < 1e-11
        assert tangential_residual(manufactured_rhs(spec, y), n) < 1e-11
        G = tangential_gradient(spec, y)
        assert np.max(np.abs(np.einsum("nij,nj->ni", G, n))) < 1e-11
        assert np.max(np.abs(np.einsum("ni,nij->nj", n, G))) < 1e-11

    def test_mass_coefficient_is_linear_in_rhs(self):
        y = Sphere().sample(50, np.random.default_rng(6))
        f1 = manufactured_rhs(sphere_spec(0.1), y)
        f2 = manufactured_rhs(sphere_spec(1.1), y)
        np.testing.assert_allclose(f2 - f1, exact_solution(sphere_spec(), y), atol=1e-13)

    def test_shapes_and_chunking(self):
        from surfcr import tangential
        y = Sphere().sample(30, np.random.default_rng(7)).reshape(5, 6, 3)
        full = bochner_laplacian(sphere_spec(), y)
        old = tangential.CHUNK
        try:
            tangential.CHUNK = 7
            chunked = bochner_laplacian(sphere_spec(), y)
        finally:
            tangential.CHUNK = old
        assert full.shape == (5, 6, 3)
        np.testing.assert_array_equal(full, chunked)


def test_generic_surface_with_normal_expression():
    from surfcr import jets
    g = GenericLevelSet(lambda x1, x2, x3: x1 * x1 + x2 * x2 + x3 * x3 - 1.0, delta=0.4,
                        normal_expr=lambda x1, x2, x3: tuple(
                            c / jets.sqrt(x1 * x1 + x2 * x2 + x3 * x3) for c in (x1, x2, x3)))
    y = Sphere().sample(20, np.random.default_rng(8))
    ref = bochner_laplacian(sphere_spec(), y)
    np.testing.assert_allclose(bochner_laplacian(sphere_spec(surface=g), y), ref, atol=1e-12)


def test_requires_surface_points():
    with pytest.raises(NotOnSurface):
        bochner_laplacian(sphere_spec(), np.array([1.1, 0.0, 0.0]))
    with pytest.raises(NotOnSurface):
        manufactured_rhs(torus_spec(), np.array([1.0, 0.0, 0.0]))


def test_invalid_mass_coefficient():
    with pytest.raises(ValueError):
        sphere_spec(0.0)
