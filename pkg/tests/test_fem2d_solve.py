"""P2 assembly patch tests, eigenvalue accuracy, invariances, and rates."""

import math

import numpy as np
import pytest

from snlab import geom2d
from snlab.fem2d import assemble, neumann_mu1, polygon_mesh, refine, steklov_sigma1

PI2 = math.pi ** 2


def test_patch_identities(square_solution):
    system = square_solution["system"]
    ones = np.ones(system.n_dofs)
    geo = square_solution["geo"]
    # constants are in the kernel of the stiffness form
    assert np.max(np.abs(system.K @ ones)) < 1e-12
    assert ones @ (system.M @ ones) == pytest.approx(geo.area, rel=1e-12)
    assert ones @ (system.B @ ones) == pytest.approx(geo.perimeter, rel=1e-12)


def test_linear_field_stiffness_energy(square_solution):
    """For u = a.x the Dirichlet energy int |grad u|^2 equals |a|^2 |Omega|."""
    system = square_solution["system"]
    a = np.array([0.7, -0.4])
    u = system.nodes @ a
    energy = u @ (system.K @ u)
    assert energy == pytest.approx((a @ a) * square_solution["geo"].area, rel=1e-11)


def test_square_neumann_eigenvalue_exact(square_solution):
    # unit square: mu1 = pi^2 (doubly degenerate)
    assert square_solution["mu"].eigenvalue == pytest.approx(PI2, rel=1e-6)


def test_unit_disk_values():
    from snlab import bessel
    poly = geom2d.named("disk:96")
    geo = geom2d.functionals(poly)
    mesh = polygon_mesh(poly, 0.12)
    system = assemble(mesh)
    jp = bessel.j1prime_first_zero()
    assert neumann_mu1(system).eigenvalue * geo.area == pytest.approx(
        math.pi * jp ** 2, rel=5e-3)
    assert steklov_sigma1(system).eigenvalue * geo.perimeter == pytest.approx(
        2.0 * math.pi, rel=5e-3)


def test_golden_triangle_values(t1_solution, t2_solution):
    assert t1_solution["mu"].eigenvalue == pytest.approx(16.0 * PI2 / 9.0, rel=2e-3)
    assert t2_solution["mu"].eigenvalue == pytest.approx(PI2, rel=2e-3)
    assert t1_solution["sigma"].eigenvalue == pytest.approx(1.2908, abs=0.004)
    assert t2_solution["sigma"].eigenvalue == pytest.approx(0.7310, abs=0.004)
    assert t1_solution["F"] == pytest.approx(1.962, abs=0.02)
    assert t2_solution["F"] == pytest.approx(1.977, abs=0.02)


def test_residual_certificates(square_solution, t1_solution):
    for sol in (square_solution, t1_solution):
        assert sol["mu"].residual <= 1e-9
        assert sol["sigma"].residual <= 1e-9
        assert sol["mu"].eigenvalue > 0.0
        assert sol["sigma"].eigenvalue > 0.0


def test_eigenvector_shapes(square_solution):
    system = square_solution["system"]
    assert square_solution["mu"].eigenvector.shape == (system.n_dofs,)
    assert square_solution["sigma"].eigenvector.shape == (system.n_dofs,)


def test_rigid_motion_and_dilation_invariance(hull_polygon):
    base = hull_polygon.vertices
    theta = 0.83
    rot = np.array([[math.cos(theta), -math.sin(theta)],
                    [math.sin(theta), math.cos(theta)]])
    moved = geom2d.ConvexPolygon(2.5 * (base @ rot.T) + np.array([3.0, -1.0]))

    def normalized(poly, hmax):
        geo = geom2d.functionals(poly)
        system = assemble(polygon_mesh(poly, hmax))
        return (neumann_mu1(system).eigenvalue * geo.area,
                steklov_sigma1(system).eigenvalue * geo.perimeter)

    # hmax scales with the domain, so the canonical-frame meshes are similar
    y0, x0 = normalized(hull_polygon, 0.08)
    y1, x1 = normalized(moved, 0.08 * 2.5)
    assert y1 == pytest.approx(y0, rel=1e-8)
    assert x1 == pytest.approx(x0, rel=1e-8)


def test_refinement_convergence_rate():
    """P2 eigenvalues converge like h^4 on smooth-enough domains."""
    poly = geom2d.named("square")
    mesh = polygon_mesh(poly, 0.14)
    values = []
    for _ in range(3):
        values.append(neumann_mu1(assemble(mesh)).eigenvalue)
        mesh = refine(mesh)
    d1, d2 = values[1] - values[0], values[2] - values[1]
    rate = math.log2(abs(d1 / d2))
    assert rate >= 3.0
    assert abs(values[-1] - PI2) < abs(values[0] - PI2) / 30.0


def test_steklov_vs_neumann_ordering(square_solution):
    # on the square the normalized quantities keep 1 <= F <= 2
    assert 1.0 < square_solution["F"] < 2.0
