"""Triangle meshes for convex polygons and thin strips.

General polygons get an isotropic mesh: boundary edges subdivided to the
target size, a hexagonal interior lattice clipped away from the boundary,
Delaunay triangulation, and a few rounds of Laplacian smoothing (with
re-triangulation, so no element can invert).  Convexity makes Delaunay exact:
the triangulated hull of the point set is the polygon itself.

Meshing happens in a canonical frame (centroid at the origin, unit area,
longest edge aligned with the x-axis) and is mapped back, so congruent or
scaled polygons receive congruent or scaled meshes and normalized spectral
quantities are invariant to machine precision, not just to discretization
accuracy.

Thin strips between two profile graphs get a structured anisotropic mesh:
marching columns in x (graded by the local thickness, so degenerate tips are
approached gracefully) with a fixed small number of cross layers.  Columns of
zero thickness collapse to a single node and are connected by fans.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay

from ..geom2d import ConvexPolygon
from ..profiles import ProfileH

QUALITY_FLOOR_DEG = 20.0


class MeshError(RuntimeError):
    """Mesh construction or conformity failure."""


@dataclass(frozen=True)
class TriangleMesh:
    """Conforming triangulation with positively oriented triangles."""

    nodes: np.ndarray
    triangles: np.ndarray
    quality_warning: str | None = field(default=None, compare=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        tris = np.asarray(self.triangles, dtype=np.int64)
        if nodes.ndim != 2 or nodes.shape[1] != 2 or tris.ndim != 2 or tris.shape[1] != 3:
            raise MeshError("nodes must be (n, 2) and triangles (m, 3)")
        if tris.min() < 0 or tris.max() >= nodes.shape[0]:
            raise MeshError("triangle index out of range")
        if np.any(_signed_areas(nodes, tris) <= 0):
            raise MeshError("triangles must be positively oriented and non-degenerate")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "triangles", tris)
        nodes.setflags(write=False)
        tris.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def areas(self) -> np.ndarray:
        return 0.5 * _signed_areas(self.nodes, self.triangles)

    def hmax(self) -> float:
        return float(np.sqrt(_edge_lengths_sq(self.nodes, self.triangles).max()))

    def min_angle_deg(self) -> float:
        v = self.nodes[self.triangles]
        angles = []
        for i in range(3):
            a = v[:, (i + 1) % 3] - v[:, i]
            b = v[:, (i + 2) % 3] - v[:, i]
            cosang = np.einsum("ij,ij->i", a, b) / (
                np.hypot(a[:, 0], a[:, 1]) * np.hypot(b[:, 0], b[:, 1]))
            angles.append(np.arccos(np.clip(cosang, -1.0, 1.0)))
        return float(np.degrees(np.min(angles)))

    def boundary_edges(self) -> np.ndarray:
        """Edges on exactly one triangle, oriented with the domain on the left."""
        t = self.triangles
        edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        key = np.sort(edges, axis=1)
        _, first, counts = np.unique(key, axis=0, return_index=True, return_counts=True)
        if counts.max() > 2:
            raise MeshError("non-manifold edge")
        return edges[first[counts == 1]]


def _signed_areas(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    v = nodes[tris]
    return ((v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
            - (v[:, 1, 1] - v[:, 0, 1]) * (v[:, 2, 0] - v[:, 0, 0]))


def _edge_lengths_sq(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    v = nodes[tris]
    out = []
    for i in range(3):
        d = v[:, (i + 1) % 3] - v[:, i]
        out.append(d[:, 0] ** 2 + d[:, 1] ** 2)
    return np.stack(out)


def _orient_ccw(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    flip = _signed_areas(nodes, tris) < 0
    tris = tris.copy()
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris


def _boundary_ring(vertices: np.ndarray, h: float) -> np.ndarray:
    pts = []
    n = vertices.shape[0]
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        nseg = max(1, int(np.ceil(np.hypot(*(b - a)) / h)))
        for k in range(nseg):          # omit b; the next edge supplies it
            t = k / nseg
            pts.append((1 - t) * a + t * b)
    return np.array(pts)


def _interior_lattice(vertices: np.ndarray, h: float, clearance: float) -> np.ndarray:
    e = np.roll(vertices, -1, axis=0) - vertices
    normals = np.stack([-e[:, 1], e[:, 0]], axis=1)
    normals /= np.hypot(normals[:, 0], normals[:, 1])[:, None]
    xmin, ymin = vertices.min(axis=0)
    xmax, ymax = vertices.max(axis=0)
    dy = h * np.sqrt(3.0) / 2.0
    rows = np.arange(ymin + dy / 2, ymax, dy)
    pts = []
    for j, y in enumerate(rows):
        xs = np.arange(xmin + (0.25 + 0.5 * (j % 2)) * h, xmax, h)
        pts.append(np.stack([xs, np.full_like(xs, y)], axis=1))
    if not pts:
        return np.empty((0, 2))
    p = np.concatenate(pts)
    # signed distance to each edge line; inside a convex polygon the minimum
    # over edges is the distance to the boundary
    d = np.min(np.einsum("pk,ek->pe", p, normals)
               - np.einsum("ek,ek->e", normals, vertices), axis=1)
    return p[d >= clearance]


def _smooth(points: np.ndarray, n_fixed: int, rounds: int) -> tuple[np.ndarray, np.ndarray]:
    tri = Delaunay(points)
    for _ in range(rounds):
        indptr, indices = tri.vertex_neighbor_vertices
        new = points.copy()
        for v in range(n_fixed, points.shape[0]):
            nb = indices[indptr[v]:indptr[v + 1]]
            if nb.size:
                new[v] = points[nb].mean(axis=0)
        points = new
        tri = Delaunay(points)
    return points, tri.simplices


def _repair_slivers(pts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    """Remove zero-area simplices that qhull emits for collinear point runs.

    Subdividing a straight polygon edge puts exactly collinear points on the
    hull, and qhull triangulates that flat cap arbitrarily — often a fan of
    zero-area triangles.  All such triangles are dropped; the surviving mesh
    still covers the polygon, but its boundary may run along chords that skip
    cap points, leaving them hanging.  For every boundary chord the hanging
    points on it are collected and the (unique) positive triangle behind the
    chord is fanned through them, which restores a conforming triangulation
    that uses every input point.
    """
    span = pts.max(axis=0) - pts.min(axis=0)
    scale = float(np.hypot(*span))
    tol = 1e-10 * scale * scale
    bad = np.abs(_signed_areas(pts, tris)) <= tol
    if not bad.any():
        return tris
    work = tris[~bad]

    # points needing re-insertion: vertices of dropped triangles, plus any
    # point qhull left out of the triangulation altogether
    candidates = np.union1d(np.unique(tris[bad]),
                            np.setdiff1d(np.arange(len(pts)), np.unique(tris)))

    # a triangle owns at most one fan per pass; a corner triangle facing two
    # caps is split along one chord now and the other on the next pass
    for _ in range(5):
        edge_owner: dict = {}
        for ti, t in enumerate(work):
            for k in range(3):
                a, b = t[k], t[(k + 1) % 3]
                edge_owner.setdefault((min(a, b), max(a, b)), []).append(
                    (ti, int(t[(k + 2) % 3])))
        replaced: set = set()
        fans = []
        for (a, b), owners in edge_owner.items():
            if len(owners) != 1 or owners[0][0] in replaced:
                continue
            cand = candidates[(candidates != a) & (candidates != b)]
            if cand.size == 0:
                continue
            A, B = pts[a], pts[b]
            ab = B - A
            length = float(np.hypot(*ab))
            d = pts[cand] - A
            off_line = np.abs(d[:, 0] * ab[1] - d[:, 1] * ab[0])
            t_par = (d @ ab) / (length * length)
            inside = (off_line <= 1e-12 * scale * length) \
                & (t_par > 0.0) & (t_par < 1.0)
            if not inside.any():
                continue
            ti, z = owners[0]
            replaced.add(ti)
            chain = [a, *cand[inside][np.argsort(t_par[inside])], b]
            fans += [(chain[k], chain[k + 1], z) for k in range(len(chain) - 1)]
        if not fans:
            break
        work = np.array([tuple(t) for ti, t in enumerate(work)
                         if ti not in replaced] + fans, dtype=tris.dtype)

    out = _orient_ccw(pts, work)
    if np.unique(out).size != len(pts):
        raise MeshError("sliver repair left unused points")
    if np.any(np.abs(_signed_areas(pts, out)) <= tol):
        raise MeshError("sliver repair left degenerate triangles")
    return out


def polygon_mesh(poly: ConvexPolygon, hmax: float, smooth_rounds: int = 4) -> TriangleMesh:
    """Isotropic mesh of a convex polygon with target element size ``hmax``.

    The achieved maximum edge (see ``TriangleMesh.hmax``) tracks the target to
    within about 25%; uniform :func:`refine` halves it exactly.
    """
    if hmax <= 0:
        raise MeshError("hmax must be positive")
    v = poly.vertices
    # canonical frame: area centroid -> origin, unit area, longest edge along x
    x, y = v[:, 0], v[:, 1]
    cross = x * np.roll(y, -1) - np.roll(x, -1) * y
    a2 = cross.sum()
    cx = float(((x + np.roll(x, -1)) * cross).sum() / (3.0 * a2))
    cy = float(((y + np.roll(y, -1)) * cross).sum() / (3.0 * a2))
    scale = float(np.sqrt(0.5 * a2))
    edges = np.roll(v, -1, axis=0) - v
    k = int(np.argmax(np.hypot(edges[:, 0], edges[:, 1])))
    theta = float(np.arctan2(edges[k, 1], edges[k, 0]))
    rot = np.array([[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]])
    canon = (v - [cx, cy]) @ rot.T / scale
    h = hmax / scale

    ring = _boundary_ring(canon, 0.8 * h)
    inner = _interior_lattice(canon, 0.8 * h, clearance=0.44 * h)
    pts = np.concatenate([ring, inner]) if inner.size else ring
    pts, simplices = _smooth(pts, ring.shape[0], smooth_rounds)
    tris = _repair_slivers(pts, np.asarray(simplices, dtype=np.int64))
    tris = _orient_ccw(pts, tris)

    covered = 0.5 * _signed_areas(pts, tris).sum()
    target = 0.5 * float(np.abs((canon[:, 0] * np.roll(canon[:, 1], -1)
                                 - np.roll(canon[:, 0], -1) * canon[:, 1]).sum()))
    if abs(covered - target) > 1e-9 * target:
        raise MeshError("triangulation does not cover the polygon")

    nodes = pts @ rot * scale + [cx, cy]
    mesh = TriangleMesh(nodes, tris)
    ang = mesh.min_angle_deg()
    if ang < QUALITY_FLOOR_DEG:
        mesh = TriangleMesh(nodes, tris,
                            quality_warning=f"min angle {ang:.2f} deg below "
                                            f"{QUALITY_FLOOR_DEG} deg floor")
    return mesh


def refine(mesh: TriangleMesh) -> TriangleMesh:
    """Uniform 1-to-4 refinement; midpoints of straight boundary edges stay on them."""
    t = mesh.triangles
    edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    key = np.sort(edges, axis=1)
    uniq, inverse = np.unique(key, axis=0, return_inverse=True)
    mid = 0.5 * (mesh.nodes[uniq[:, 0]] + mesh.nodes[uniq[:, 1]])
    m = inverse.reshape(3, -1).T + mesh.n_nodes      # columns: m01, m12, m20
    nodes = np.concatenate([mesh.nodes, mid])
    tris = np.concatenate([
        np.stack([t[:, 0], m[:, 0], m[:, 2]], axis=1),
        np.stack([t[:, 1], m[:, 1], m[:, 0]], axis=1),
        np.stack([t[:, 2], m[:, 2], m[:, 1]], axis=1),
        m,
    ])
    return TriangleMesh(nodes, tris, quality_warning=mesh.quality_warning)


def _thin_columns(hplus: ProfileH, hminus: ProfileH, dx0: float, dx_min: float) -> np.ndarray:
    """March a graded x-grid; every profile knot is hit exactly."""
    knots = np.union1d(hplus.knots, hminus.knots)
    xs = [0.0]
    while xs[-1] < 1.0:
        x = xs[-1]
        span = float(hplus(x)) + float(hminus(x))
        step = min(dx0, max(dx_min, span))
        nxt = x + step
        ahead = knots[knots > x + 1e-15]
        if ahead.size and ahead[0] <= nxt + 0.3 * step:
            nxt = ahead[0]          # never step over a kink, never leave a sliver
        xs.append(min(1.0, nxt))
    return np.array(xs)


def thin_mesh(hplus: ProfileH, hminus: ProfileH, eps: float,
              dx0: float = 0.01, layers: int = 4,
              dx_min: float | None = None) -> TriangleMesh:
    """Structured anisotropic mesh of the strip -eps*hminus <= y <= eps*hplus.

    Anisotropy is intentional: the spectral quantities of interest vary slowly
    across the strip, and slab-aligned elements keep the degree-of-freedom
    count bounded as eps -> 0.  The isotropic quality floor does not apply.
    """
    if eps <= 0:
        raise MeshError("eps must be positive")
    if dx_min is None:
        dx_min = dx0 / 8.0
    xs = _thin_columns(hplus, hminus, dx0, dx_min)
    top = eps * hplus(xs)
    bot = -eps * hminus(xs)
    thick = top - bot
    tiny = 1e-13 * eps * max(thick.max(), 1.0)

    nodes: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    for x, yb, yt, t in zip(xs, bot, top, thick):
        start = sum(c.size for c in cols)
        if t <= tiny:
            idx = np.array([start])
            nodes.append(np.array([[x, 0.5 * (yb + yt)]]))
        else:
            idx = np.arange(start, start + layers + 1)
            nodes.append(np.stack([np.full(layers + 1, x),
                                   np.linspace(yb, yt, layers + 1)], axis=1))
        cols.append(idx)
    allnodes = np.concatenate(nodes)

    tris = []
    for left, right in zip(cols[:-1], cols[1:]):
        if left.size == 1 and right.size == 1:
            raise MeshError("two adjacent degenerate columns; decrease dx_min")
        if left.size == 1:
            a = left[0]
            for j in range(right.size - 1):
                tris.append((a, right[j], right[j + 1]))
        elif right.size == 1:
            b = right[0]
            for j in range(left.size - 1):
                tris.append((left[j], b, left[j + 1]))
        else:
            for j in range(layers):
                tris.append((left[j], right[j], right[j + 1]))
                tris.append((left[j], right[j + 1], left[j + 1]))
    return TriangleMesh(allnodes, _orient_ccw(allnodes, np.array(tris, dtype=np.int64)))
