"""Convex polygon geometry: hulls, functionals, thin domains, named shapes.

Functionals follow the classical algorithms: shoelace area, rotating calipers
for diameter and width, Chebyshev center by linear programming for the
inradius.  Thin domains are built from a pair of profiles as
{(x, y): -eps h_minus(x) <= y <= eps h_plus(x)}; for concave profiles the
result is convex and, since profiles are piecewise linear, the polygon is the
exact domain rather than a sampling of it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .profiles import ProfileH

COLLINEAR_TOL = 1e-12


class GeometryError(ValueError):
    """Degenerate or non-convex input geometry."""


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon, vertices in counterclockwise order."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise GeometryError("need an (n, 2) array with n >= 3")
        if not np.all(np.isfinite(v)):
            raise GeometryError("non-finite vertex coordinates")
        scale = float(np.abs(v).max())
        cross = _edge_crosses(v)
        if np.any(cross <= COLLINEAR_TOL * max(scale * scale, 1e-30)):
            raise GeometryError("vertices must be strictly convex and counterclockwise")
        object.__setattr__(self, "vertices", v.copy())
        self.vertices.setflags(write=False)

    @property
    def n(self) -> int:
        return self.vertices.shape[0]


def _edge_crosses(v: np.ndarray) -> np.ndarray:
    e = np.roll(v, -1, axis=0) - v
    e_next = np.roll(e, -1, axis=0)
    return e[:, 0] * e_next[:, 1] - e[:, 1] * e_next[:, 0]


def prune_collinear(points: np.ndarray, tol: float = COLLINEAR_TOL) -> np.ndarray:
    """Drop vertices whose adjacent edges are collinear (or reflex-degenerate)."""
    v = np.asarray(points, dtype=float)
    scale = max(float(np.abs(v).max()) ** 2, 1e-30)
    for _ in range(v.shape[0]):
        if v.shape[0] < 3:
            raise GeometryError("pruning collapsed the polygon")
        prev = np.roll(v, 1, axis=0)
        nxt = np.roll(v, -1, axis=0)
        cross = ((v[:, 0] - prev[:, 0]) * (nxt[:, 1] - v[:, 1])
                 - (v[:, 1] - prev[:, 1]) * (nxt[:, 0] - v[:, 0]))
        keep = cross > tol * scale
        if np.all(keep):
            return v
        v = v[keep]
    raise GeometryError("pruning did not stabilize")


def convex_hull(points) -> np.ndarray:
    """Convex hull by Andrew's monotone chain; collinear points are dropped.

    Returns hull vertices in counterclockwise order starting from the
    lexicographically smallest point.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] < 3:
        raise GeometryError("need at least three distinct points")
    # lexicographic sort by (x, y)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if hull.shape[0] < 3:
        raise GeometryError("hull is degenerate (collinear points)")
    return hull


def random_hull(count: int = 15, rng: np.random.Generator | None = None,
                seed: int | None = None) -> ConvexPolygon:
    """Hull of uniform points in the unit square."""
    if rng is None:
        rng = np.random.default_rng(seed)
    for _ in range(100):
        try:
            return ConvexPolygon(convex_hull(rng.random((count, 2))))
        except GeometryError:
            continue
    raise GeometryError("could not generate a non-degenerate hull")


def area(p: ConvexPolygon) -> float:
    v = p.vertices
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def perimeter(p: ConvexPolygon) -> float:
    e = np.roll(p.vertices, -1, axis=0) - p.vertices
    return float(np.hypot(e[:, 0], e[:, 1]).sum())


def diameter(p: ConvexPolygon) -> float:
    """Largest vertex distance, by rotating calipers over antipodal pairs."""
    v = p.vertices
    n = v.shape[0]
    if n == 3:
        d2 = max(float((v[i] - v[j]) @ (v[i] - v[j])) for i in range(3) for j in range(i))
        return float(np.sqrt(d2))
    best = 0.0
    j = 1
    for i in range(n):
        edge = v[(i + 1) % n] - v[i]
        # advance the antipodal vertex while the triangle area keeps growing
        while True:
            jn = (j + 1) % n
            cur = edge[0] * (v[j][1] - v[i][1]) - edge[1] * (v[j][0] - v[i][0])
            nxt = edge[0] * (v[jn][1] - v[i][1]) - edge[1] * (v[jn][0] - v[i][0])
            if nxt > cur:
                j = jn
            else:
                break
        for k in (i, (i + 1) % n):
            d = v[j] - v[k]
            best = max(best, float(d @ d))
    return float(np.sqrt(best))


def width(p: ConvexPolygon) -> float:
    """Smallest slab containing the polygon: min over edges of the support distance."""
    v = p.vertices
    n = v.shape[0]
    best = np.inf
    j = 1
    for i in range(n):
        a = v[i]
        edge = v[(i + 1) % n] - a
        elen = float(np.hypot(edge[0], edge[1]))
        while True:
            jn = (j + 1) % n
            cur = edge[0] * (v[j][1] - a[1]) - edge[1] * (v[j][0] - a[0])
            nxt = edge[0] * (v[jn][1] - a[1]) - edge[1] * (v[jn][0] - a[0])
            if nxt > cur:
                j = jn
            else:
                break
        cur = edge[0] * (v[j][1] - a[1]) - edge[1] * (v[j][0] - a[0])
        best = min(best, cur / elen)
    return float(best)


def inradius(p: ConvexPolygon) -> tuple[float, np.ndarray]:
    """Chebyshev center: maximize r subject to being r inside every edge."""
    v = p.vertices
    e = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(e[:, 0], e[:, 1])
    # inward normal of a CCW edge is (-ey, ex) / |e|
    normals = np.stack([-e[:, 1], e[:, 0]], axis=1) / lengths[:, None]
    # constraint: n . (c - v_i) >= r  ->  -n . c + r <= -n . v_i
    A_ub = np.hstack([-normals, np.ones((v.shape[0], 1))])
    b_ub = -np.einsum("ij,ij->i", normals, v)
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=A_ub, b_ub=b_ub,
                  bounds=[(None, None), (None, None), (0, None)], method="highs")
    if not res.success:
        raise GeometryError(f"Chebyshev center LP failed: {res.message}")
    cx, cy, r = res.x
    return float(r), np.array([cx, cy])


@dataclass(frozen=True)
class GeometryFunctionals:
    area: float
    perimeter: float
    diameter: float
    width: float
    inradius: float

    def __post_init__(self):
        ok = (0 < self.area
              and 0 < 2.0 * self.inradius <= self.width + 1e-9 * self.diameter
              and self.width <= self.diameter * (1 + 1e-12)
              and self.perimeter <= np.pi * self.diameter * (1 + 1e-12))
        if not ok:
            raise GeometryError(f"inconsistent functionals: {self}")


def functionals(p: ConvexPolygon) -> GeometryFunctionals:
    r, _ = inradius(p)
    return GeometryFunctionals(area=area(p), perimeter=perimeter(p),
                               diameter=diameter(p), width=width(p), inradius=r)


def thin_domain(hplus: ProfileH, hminus: ProfileH, eps: float,
                samples: int | None = None) -> ConvexPolygon:
    """Convex polygon between eps*hplus above and eps*hminus below [0, 1].

    Both profiles must be concave and nonnegative, and at least one of
    hplus(x) + hminus(x) must be positive away from the endpoints.  All
    profile knots enter the vertex set, so the polygon is exact.
    """
    if eps <= 0:
        raise GeometryError("thickness must be positive")
    xs = np.union1d(hplus.knots, hminus.knots)
    if samples is not None and samples > 2:
        xs = np.union1d(xs, np.linspace(0.0, 1.0, samples))
    top = eps * hplus(xs)
    bot = -eps * hminus(xs)
    pts = []
    for x, y in zip(xs, bot):
        pts.append((x, y))
    for x, y in zip(xs[::-1], top[::-1]):
        pts.append((x, y))
    arr = np.array(pts)
    # drop consecutive duplicates (degenerate tips where both chains meet)
    keep = np.ones(arr.shape[0], dtype=bool)
    for i in range(arr.shape[0]):
        if np.allclose(arr[i], arr[(i + 1) % arr.shape[0]], atol=1e-15):
            keep[(i + 1) % arr.shape[0]] = False
    arr = arr[keep]
    return ConvexPolygon(prune_collinear(arr))


def regular_polygon(n: int, circumradius: float = 1.0) -> ConvexPolygon:
    if n < 3:
        raise GeometryError("need at least three vertices")
    th = 2.0 * np.pi * np.arange(n) / n
    return ConvexPolygon(circumradius * np.stack([np.cos(th), np.sin(th)], axis=1))


def named(spec: str) -> ConvexPolygon:
    """Named shapes: T1, T2, square, disk[:n], rectangle:L:W."""
    parts = spec.split(":")
    kind = parts[0]
    if kind == "T1":
        return ConvexPolygon(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]]))
    if kind == "T2":
        return ConvexPolygon(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    if kind == "square":
        return ConvexPolygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    if kind == "disk":
        n = int(parts[1]) if len(parts) > 1 else 256
        return regular_polygon(n)
    if kind == "rectangle":
        if len(parts) != 3:
            raise GeometryError("rectangle spec is rectangle:L:W")
        L, W = float(parts[1]), float(parts[2])
        if L <= 0 or W <= 0:
            raise GeometryError("rectangle sides must be positive")
        return ConvexPolygon(np.array([[0.0, 0.0], [L, 0.0], [L, W], [0.0, W]]))
    raise GeometryError(f"unknown shape {spec!r}")


def to_dict(p: ConvexPolygon) -> dict:
    return {"vertices": p.vertices.tolist()}


def from_dict(d: dict) -> ConvexPolygon:
    try:
        return ConvexPolygon(np.asarray(d["vertices"], dtype=float))
    except (KeyError, TypeError) as exc:
        raise GeometryError(f"malformed polygon object: {exc}") from exc


def save(p: ConvexPolygon, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_dict(p), f)
        f.write("\n")


def load(path) -> ConvexPolygon:
    with open(path, encoding="utf-8") as f:
        return from_dict(json.load(f))


def resolve(spec: str) -> ConvexPolygon:
    """Named shape or path to a polygon JSON file."""
    if spec.split(":")[0] in ("T1", "T2", "square", "disk", "rectangle"):
        return named(spec)
    return load(spec)
