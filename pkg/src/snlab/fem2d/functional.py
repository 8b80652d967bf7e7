"""Domain-level spectral functionals and thin-strip sweeps.

``F_of_domain`` ties geometry and spectrum together for one polygon:
x = sigma1 * perimeter, y = mu1 * area, F = y / x.

``thin_sweep`` drives strips eps*(hplus, hminus) through decreasing eps,
rescales sigma1 by 2/eps, and extrapolates with Aitken's delta-squared, which
needs no a-priori convergence order.  The limits are the 1D weighted
eigenvalues of the total thickness profile h = hplus + hminus: mu1(strip) ->
mu1(h), 2*sigma1(strip)/eps -> sigma1(h), and F(strip) -> F(h).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import geom2d, profiles, sl1d
from ..geom2d import ConvexPolygon
from ..profiles import ProfileH
from .assemble import assemble
from .mesh import polygon_mesh, thin_mesh
from .solve import neumann_mu1, steklov_sigma1


@dataclass(frozen=True)
class DomainRecord:
    area: float
    perimeter: float
    diameter: float
    width: float
    inradius: float
    mu1: float
    sigma1: float
    x: float
    y: float
    F: float
    dofs: int
    hmax: float
    mu_residual: float
    sigma_residual: float
    warning: str | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "area", "perimeter", "diameter", "width", "inradius",
            "mu1", "sigma1", "x", "y", "F", "dofs", "hmax")}


def F_of_domain(poly: ConvexPolygon, hmax: float = 0.03) -> DomainRecord:
    geo = geom2d.functionals(poly)
    mesh = polygon_mesh(poly, hmax)
    system = assemble(mesh)
    mu = neumann_mu1(system)
    sg = steklov_sigma1(system)
    x = sg.eigenvalue * geo.perimeter
    y = mu.eigenvalue * geo.area
    return DomainRecord(
        area=geo.area, perimeter=geo.perimeter, diameter=geo.diameter,
        width=geo.width, inradius=geo.inradius,
        mu1=mu.eigenvalue, sigma1=sg.eigenvalue, x=x, y=y, F=y / x,
        dofs=system.n_dofs, hmax=mesh.hmax(),
        mu_residual=mu.residual, sigma_residual=sg.residual,
        warning=mesh.quality_warning)


def record_from_mesh(mesh, geo: geom2d.GeometryFunctionals,
                     warning: str | None = None) -> DomainRecord:
    """Functional record when the mesh is supplied (structured thin strips)."""
    system = assemble(mesh)
    mu = neumann_mu1(system)
    sg = steklov_sigma1(system)
    x = sg.eigenvalue * geo.perimeter
    y = mu.eigenvalue * geo.area
    return DomainRecord(
        area=geo.area, perimeter=geo.perimeter, diameter=geo.diameter,
        width=geo.width, inradius=geo.inradius,
        mu1=mu.eigenvalue, sigma1=sg.eigenvalue, x=x, y=y, F=y / x,
        dofs=system.n_dofs, hmax=mesh.hmax(),
        mu_residual=mu.residual, sigma_residual=sg.residual, warning=warning)


def aitken(values) -> float:
    """Delta-squared limit from the last three terms (falls back to the last)."""
    a, b, c = (float(v) for v in values[-3:])
    denom = c - 2.0 * b + a
    if denom == 0.0 or abs(denom) < 1e-14 * max(abs(a), abs(b), abs(c)):
        return c
    return c - (c - b) ** 2 / denom


@dataclass(frozen=True)
class ThinSweep:
    eps: tuple
    mu1: tuple
    sigma1: tuple
    sigma1_rescaled: tuple       # 2 sigma1 / eps
    F: tuple
    mu1_extrapolated: float
    sigma1_rescaled_extrapolated: float
    F_extrapolated: float
    mu1_limit: float
    sigma1_limit: float
    F_limit: float

    def relative_gaps(self) -> dict:
        return {
            "mu1": abs(self.mu1_extrapolated - self.mu1_limit) / abs(self.mu1_limit),
            "sigma1": abs(self.sigma1_rescaled_extrapolated - self.sigma1_limit)
                      / abs(self.sigma1_limit),
            "F": abs(self.F_extrapolated - self.F_limit) / abs(self.F_limit),
        }


def thin_sweep(hplus: ProfileH, hminus: ProfileH, eps_list,
               dx0: float = 0.005, layers: int = 4,
               elements_1d: int = 2048) -> ThinSweep:
    eps_arr = tuple(float(e) for e in eps_list)
    if len(eps_arr) < 3 or any(b >= a for a, b in zip(eps_arr, eps_arr[1:])):
        raise ValueError("need a decreasing list of at least three eps values")
    mu_seq, sg_seq, scaled_seq, f_seq = [], [], [], []
    for eps in eps_arr:
        mesh = thin_mesh(hplus, hminus, eps, dx0=dx0, layers=layers)
        geo = geom2d.functionals(geom2d.thin_domain(hplus, hminus, eps))
        rec = record_from_mesh(mesh, geo)
        mu_seq.append(rec.mu1)
        sg_seq.append(rec.sigma1)
        scaled_seq.append(2.0 * rec.sigma1 / eps)
        f_seq.append(rec.F)

    h = profiles.add(hplus, hminus)
    mu_lim = sl1d.mu1_extrapolated(h, elements=elements_1d)
    sg_lim = sl1d.sigma1_extrapolated(h, elements=elements_1d)
    f_lim = mu_lim * h.integral() / sg_lim
    return ThinSweep(
        eps=eps_arr, mu1=tuple(mu_seq), sigma1=tuple(sg_seq),
        sigma1_rescaled=tuple(scaled_seq), F=tuple(f_seq),
        mu1_extrapolated=aitken(mu_seq),
        sigma1_rescaled_extrapolated=aitken(scaled_seq),
        F_extrapolated=aitken(f_seq),
        mu1_limit=mu_lim, sigma1_limit=sg_lim, F_limit=f_lim)
