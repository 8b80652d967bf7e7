"""P2 Lagrange assembly: stiffness, domain mass, and boundary mass matrices.

Elements are affine triangles with six nodes (corners plus edge midpoints).
The 7-point degree-5 triangle rule integrates the quadratic stiffness and
quartic mass integrands exactly, so assembly introduces no quadrature error.
The boundary mass matrix uses the exact one-dimensional P2 mass matrix per
boundary edge and is supported on boundary degrees of freedom only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .mesh import TriangleMesh

_S15 = np.sqrt(15.0)
_QA = (6.0 - _S15) / 21.0
_QB = (6.0 + _S15) / 21.0
QUAD_POINTS = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [1 - 2 * _QA, _QA, _QA], [_QA, 1 - 2 * _QA, _QA], [_QA, _QA, 1 - 2 * _QA],
    [1 - 2 * _QB, _QB, _QB], [_QB, 1 - 2 * _QB, _QB], [_QB, _QB, 1 - 2 * _QB],
])
QUAD_WEIGHTS = np.array([9 / 40] + 3 * [(155 - _S15) / 1200] + 3 * [(155 + _S15) / 1200])

# gradients of the barycentric coordinates on the reference triangle
_GRAD_L = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])

# exact 1D P2 mass matrix / L, ordering (end a, end b, midpoint)
_EDGE_MASS = np.array([[4.0, -1.0, 2.0], [-1.0, 4.0, 2.0], [2.0, 2.0, 16.0]]) / 30.0


def _shape_values(lam: np.ndarray) -> np.ndarray:
    """P2 basis at barycentric points; columns (v0,v1,v2,m01,m12,m20)."""
    l0, l1, l2 = lam[:, 0], lam[:, 1], lam[:, 2]
    return np.stack([
        l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
        4 * l0 * l1, 4 * l1 * l2, 4 * l2 * l0,
    ], axis=1)


def _shape_gradients(lam: np.ndarray) -> np.ndarray:
    """Reference gradients, shape (n_points, 6, 2)."""
    n = lam.shape[0]
    g = np.zeros((n, 6, 2))
    for i in range(3):
        g[:, i] = (4 * lam[:, i, None] - 1) * _GRAD_L[i]
    for k, (i, j) in enumerate(((0, 1), (1, 2), (2, 0))):
        g[:, 3 + k] = 4 * (lam[:, i, None] * _GRAD_L[j] + lam[:, j, None] * _GRAD_L[i])
    return g


# reference tensors: mass = sum_q w N N^T, stiffness R[i,j,a,b] = sum_q w dN_i,a dN_j,b
_N = _shape_values(QUAD_POINTS)
_MASS_REF = np.einsum("q,qi,qj->ij", QUAD_WEIGHTS, _N, _N)
_G = _shape_gradients(QUAD_POINTS)
_STIFF_REF = np.einsum("q,qia,qjb->ijab", QUAD_WEIGHTS, _G, _G)


@dataclass(frozen=True)
class FEMSystem:
    """Assembled P2 system for one mesh."""

    mesh: TriangleMesh
    nodes: np.ndarray            # all P2 node coordinates, corners first
    tri6: np.ndarray             # (T, 6) connectivity
    boundary_dofs: np.ndarray    # sorted unique boundary degrees of freedom
    K: sparse.csr_matrix
    M: sparse.csr_matrix
    B: sparse.csr_matrix

    @property
    def n_dofs(self) -> int:
        return self.nodes.shape[0]


def _p2_connectivity(mesh: TriangleMesh):
    t = mesh.triangles
    edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    key = np.sort(edges, axis=1)
    uniq, inverse = np.unique(key, axis=0, return_inverse=True)
    mid_idx = inverse.reshape(3, -1).T + mesh.n_nodes
    tri6 = np.concatenate([t, mid_idx], axis=1)
    midpoints = 0.5 * (mesh.nodes[uniq[:, 0]] + mesh.nodes[uniq[:, 1]])
    nodes = np.concatenate([mesh.nodes, midpoints])

    bedges = mesh.boundary_edges()
    # recover the midpoint dof of each boundary edge through the unique-edge table
    order = {tuple(e): i for i, e in enumerate(map(tuple, uniq))}
    bmid = np.array([order[tuple(e)] for e in map(tuple, np.sort(bedges, axis=1))])
    btriples = np.stack([bedges[:, 0], bedges[:, 1], bmid + mesh.n_nodes], axis=1)
    return nodes, tri6, btriples


def assemble(mesh: TriangleMesh) -> FEMSystem:
    nodes, tri6, btriples = _p2_connectivity(mesh)
    corners = mesh.nodes[mesh.triangles]
    j11 = corners[:, 1, 0] - corners[:, 0, 0]
    j12 = corners[:, 2, 0] - corners[:, 0, 0]
    j21 = corners[:, 1, 1] - corners[:, 0, 1]
    j22 = corners[:, 2, 1] - corners[:, 0, 1]
    det = j11 * j22 - j12 * j21
    area = 0.5 * det
    # C = Jinv Jinv^T scaled per element
    inv11, inv12 = j22 / det, -j12 / det
    inv21, inv22 = -j21 / det, j11 / det
    C = np.empty((mesh.n_triangles, 2, 2))
    C[:, 0, 0] = inv11 * inv11 + inv12 * inv12
    C[:, 0, 1] = inv11 * inv21 + inv12 * inv22
    C[:, 1, 0] = C[:, 0, 1]
    C[:, 1, 1] = inv21 * inv21 + inv22 * inv22

    ke = np.einsum("e,eab,ijab->eij", area, C, _STIFF_REF)
    me = area[:, None, None] * _MASS_REF

    rows = np.repeat(tri6, 6, axis=1).ravel()
    cols = np.tile(tri6, (1, 6)).ravel()
    n = nodes.shape[0]
    K = sparse.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sparse.coo_matrix((me.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    lengths = np.hypot(*(nodes[btriples[:, 1]] - nodes[btriples[:, 0]]).T)
    be = lengths[:, None, None] * _EDGE_MASS
    brows = np.repeat(btriples, 3, axis=1).ravel()
    bcols = np.tile(btriples, (1, 3)).ravel()
    B = sparse.coo_matrix((be.ravel(), (brows, bcols)), shape=(n, n)).tocsr()

    bdofs = np.unique(btriples.ravel())
    return FEMSystem(mesh=mesh, nodes=nodes, tri6=tri6, boundary_dofs=bdofs,
                     K=K, M=M, B=B)
