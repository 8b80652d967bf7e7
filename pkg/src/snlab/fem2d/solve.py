"""Eigenvalue extraction from assembled P2 systems.

Neumann: smallest nonzero eigenvalue of (K, M) by shift-inverted Lanczos with
a small negative shift, which keeps the factored operator positive definite
and places the zero mode and the first nontrivial mode nearest the shift.

Steklov: the pencil (K, B) has boundary-supported B, so interior unknowns are
eliminated exactly by a Schur complement on the boundary block (the discrete
harmonic extension).  The reduced dense pencil is symmetric definite and small
— boundary dofs scale like the square root of the total — and is solved
directly.  Residuals are always reported against the full pencil.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh, splu

from .assemble import FEMSystem

RESIDUAL_TOL = 1e-9
_SCHUR_CHUNK = 64


class FEMError(RuntimeError):
    """Eigenvalue solve failed to converge or to certify its residual."""


@dataclass(frozen=True)
class EigenPair2D:
    eigenvalue: float
    kind: str                    # "neumann" | "steklov"
    dofs: int
    h_max: float
    residual: float
    eigenvector: np.ndarray = field(repr=False, compare=False, default=None)


def _relative_residual(K, W, lam, vec) -> float:
    kv = K @ vec
    wv = W @ vec
    return float(np.linalg.norm(kv - lam * wv)
                 / (np.linalg.norm(kv) + abs(lam) * np.linalg.norm(wv)))


def neumann_mu1(system: FEMSystem) -> EigenPair2D:
    span = system.nodes.max(axis=0) - system.nodes.min(axis=0)
    shift = -0.5 * np.pi ** 2 / float(span @ span)
    v0 = np.random.default_rng(0x5EED).standard_normal(system.n_dofs)
    try:
        vals, vecs = eigsh(system.K, k=2, M=system.M, sigma=shift, which="LM", v0=v0)
    except Exception as exc:      # pragma: no cover - ARPACK failure path
        raise FEMError(f"Neumann eigensolve failed: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    mu1 = float(vals[1])
    if mu1 <= 0 or abs(vals[0]) > 1e-6 * mu1:
        raise FEMError(f"unexpected low spectrum {vals}: zero mode not resolved")
    vec = vecs[:, 1]
    res = _relative_residual(system.K, system.M, mu1, vec)
    if res > RESIDUAL_TOL:
        raise FEMError(f"Neumann residual {res:.2e} above {RESIDUAL_TOL}")
    return EigenPair2D(eigenvalue=mu1, kind="neumann", dofs=system.n_dofs,
                       h_max=system.mesh.hmax(), residual=res, eigenvector=vec)


def steklov_sigma1(system: FEMSystem) -> EigenPair2D:
    n = system.n_dofs
    bd = system.boundary_dofs
    mask = np.zeros(n, dtype=bool)
    mask[bd] = True
    interior = np.nonzero(~mask)[0]

    K = system.K.tocsc()
    K_ii = K[interior][:, interior]
    K_ib = K[interior][:, bd].tocsc()
    K_bb = K[bd][:, bd].toarray()
    B_bb = system.B.tocsc()[bd][:, bd].toarray()

    lu = splu(K_ii.tocsc())
    nb = bd.size
    S = K_bb.copy()
    for lo in range(0, nb, _SCHUR_CHUNK):
        hi = min(lo + _SCHUR_CHUNK, nb)
        X = lu.solve(K_ib[:, lo:hi].toarray())
        S[:, lo:hi] -= K_ib.T @ X
    S = 0.5 * (S + S.T)

    vals, vecs = eigh(S, 0.5 * (B_bb + B_bb.T))
    if vals.size < 2:
        raise FEMError("boundary space too small")
    sigma1 = float(vals[1])
    if sigma1 <= 0 or abs(vals[0]) > 1e-6 * sigma1:
        raise FEMError(f"unexpected low Steklov spectrum {vals[:2]}")
    ub = vecs[:, 1]
    full = np.zeros(n)
    full[bd] = ub
    full[interior] = -lu.solve(K_ib @ ub)
    res = _relative_residual(system.K, system.B, sigma1, full)
    if res > RESIDUAL_TOL:
        raise FEMError(f"Steklov residual {res:.2e} above {RESIDUAL_TOL}")
    return EigenPair2D(eigenvalue=sigma1, kind="steklov", dofs=n,
                       h_max=system.mesh.hmax(), residual=res, eigenvector=full)
