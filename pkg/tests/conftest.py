"""Shared fixtures: expensive FEM solves are computed once per session."""

import numpy as np
import pytest

from snlab import geom2d
from snlab.fem2d import assemble, neumann_mu1, polygon_mesh, steklov_sigma1


def solve_shape(spec: str, hmax: float) -> dict:
    poly = geom2d.resolve(spec)
    geo = geom2d.functionals(poly)
    mesh = polygon_mesh(poly, hmax)
    system = assemble(mesh)
    mu = neumann_mu1(system)
    sg = steklov_sigma1(system)
    return {
        "poly": poly, "geo": geo, "mesh": mesh, "system": system,
        "mu": mu, "sigma": sg,
        "x": sg.eigenvalue * geo.perimeter,
        "y": mu.eigenvalue * geo.area,
        "F": mu.eigenvalue * geo.area / (sg.eigenvalue * geo.perimeter),
    }


@pytest.fixture(scope="session")
def square_solution():
    return solve_shape("square", 0.05)


@pytest.fixture(scope="session")
def t1_solution():
    return solve_shape("T1", 0.05)


@pytest.fixture(scope="session")
def t2_solution():
    return solve_shape("T2", 0.05)


@pytest.fixture(scope="session")
def hull_polygon():
    return geom2d.random_hull(15, rng=np.random.default_rng(42))
