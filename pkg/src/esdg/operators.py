"""Reference-element operators and the skew-hybridized SBP matrix.

All matrices live on the reference cube [-1,1]^d with unit Jacobian.
The combined quadrature grid stacks the volume points first and then
the face points (faces ordered: xi_1=-1, xi_1=+1[, xi_2=-1, xi_2=+1],
points within a face ordered by increasing tangential coordinate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import (
    NodalBasis,
    QuadratureRule,
    tensor_diff_matrices,
    tensor_vandermonde,
)

__all__ = ["ElementOperators", "build_element_operators", "apply_hadamard_flux_kernel"]


@dataclass(frozen=True)
class ElementOperators:
    degree: int
    dim: int
    basis: NodalBasis
    vol_rule: QuadratureRule
    # volume/face/combined Vandermonde matrices
    Vv: np.ndarray
    Vf: np.ndarray
    V: np.ndarray
    # quadrature weights (diagonals)
    wv: np.ndarray
    wf: np.ndarray
    # reference mass matrix, projection, modal differentiation
    Mv: np.ndarray
    Pv: np.ndarray
    Dmodal: tuple[np.ndarray, ...]
    # volume-integrated differentiation, face projection, face boundary ops
    Qv: tuple[np.ndarray, ...]
    Ev: np.ndarray
    Bf: tuple[np.ndarray, ...]  # diagonal vectors w^f * nhat_i (Jhat^f = 1)
    # assembled skew-hybridized operators, size (Nqv+Nqf)^2
    Q: tuple[np.ndarray, ...]
    # face bookkeeping
    face_points: np.ndarray  # (Nqf, d) reference coordinates
    face_normals: np.ndarray  # (Nqf, d) reference normals
    face_index: np.ndarray  # (n_faces, nqf_per_face) rows into stacked arrays
    collocated: bool
    # structural nonzeros of any Q_i with n < m (face-face pairs excluded)
    pairs_n: np.ndarray
    pairs_m: np.ndarray

    @property
    def n_coeff(self) -> int:
        return self.V.shape[1]

    @property
    def n_vol(self) -> int:
        return self.Vv.shape[0]

    @property
    def n_face(self) -> int:
        return self.Vf.shape[0]

    @property
    def n_comb(self) -> int:
        return self.n_vol + self.n_face


def _face_geometry(face_rule: QuadratureRule | None, d: int):
    """Stacked face quadrature points, weights and reference normals."""
    if d == 1:
        pts = np.array([[-1.0], [1.0]])
        w = np.array([1.0, 1.0])
        normals = np.array([[-1.0], [1.0]])
        face_index = np.array([[0], [1]])
        return pts, w, normals, face_index
    if face_rule is None:
        raise ValueError("2D elements need a 1D face quadrature rule")
    t = face_rule.nodes
    nf = face_rule.n_points
    pts, normals = [], []
    for fixed_dim, side in ((0, -1.0), (0, 1.0), (1, -1.0), (1, 1.0)):
        p = np.empty((nf, 2))
        p[:, fixed_dim] = side
        p[:, 1 - fixed_dim] = t
        n = np.zeros((nf, 2))
        n[:, fixed_dim] = side
        pts.append(p)
        normals.append(n)
    w = np.tile(face_rule.weights, 4)
    face_index = np.arange(4 * nf).reshape(4, nf)
    return np.vstack(pts), w, np.vstack(normals), face_index


def build_element_operators(
    basis: NodalBasis,
    vol_rule: QuadratureRule,
    face_rule: QuadratureRule | None,
    d: int,
) -> ElementOperators:
    """Assemble all reference-element matrices for degree-N tensor elements.

    Raises ValueError on dimension mismatches and ArithmeticError when the
    volume rule yields a singular mass matrix.
    """
    if d not in (1, 2):
        raise ValueError(f"unsupported dimension {d}")
    if vol_rule.dim != d:
        raise ValueError(f"volume rule has dimension {vol_rule.dim}, expected {d}")
    if d == 2 and (face_rule is None or face_rule.dim != 1):
        raise ValueError("2D elements require a 1D face rule")

    vol_pts = vol_rule.nodes if d > 1 else vol_rule.nodes[:, None]
    face_pts, wf, face_normals, face_index = _face_geometry(face_rule, d)

    Vv = tensor_vandermonde(basis, vol_pts)
    Vf = tensor_vandermonde(basis, face_pts)
    V = np.vstack([Vv, Vf])
    wv = vol_rule.weights

    Mv = Vv.T @ (wv[:, None] * Vv)
    # reject degenerate volume rules before inverting
    cond = np.linalg.cond(Mv)
    if not np.isfinite(cond) or cond > 1e12:
        raise ArithmeticError("volume quadrature rule yields a singular mass matrix")
    Pv = np.linalg.solve(Mv, Vv.T * wv[None, :])

    Dmodal = tuple(tensor_diff_matrices(basis, d))
    Qv = tuple(wv[:, None] * (Vv @ Dm @ Pv) for Dm in Dmodal)
    Ev = Vf @ Pv
    Bf = tuple(wf * face_normals[:, i] for i in range(d))

    nv, nf_total = Vv.shape[0], Vf.shape[0]
    n = nv + nf_total
    Q = []
    for i in range(d):
        Qi = np.zeros((n, n))
        Qi[:nv, :nv] = 0.5 * (Qv[i] - Qv[i].T)
        Qi[:nv, nv:] = 0.5 * Ev.T * Bf[i][None, :]
        Qi[nv:, :nv] = -0.5 * Bf[i][:, None] * Ev
        Qi[nv:, nv:] = 0.5 * np.diag(Bf[i])
        Q.append(Qi)
    Q = tuple(Q)

    nodes_match = False
    if vol_rule.kind == "lgl" and Vv.shape[0] == Vv.shape[1]:
        nodes_match = np.allclose(Vv, np.eye(Vv.shape[0]), atol=1e-14)

    # structural sparsity shared by the flux-differencing kernels
    mask = np.zeros((n, n), dtype=bool)
    for Qi in Q:
        mask |= np.abs(Qi) > 1e-14
    mask |= mask.T
    iu = np.triu_indices(n, k=1)
    keep = mask[iu]
    pairs_n = iu[0][keep].astype(np.int64)
    pairs_m = iu[1][keep].astype(np.int64)

    return ElementOperators(
        degree=basis.degree,
        dim=d,
        basis=basis,
        vol_rule=vol_rule,
        Vv=Vv,
        Vf=Vf,
        V=V,
        wv=wv,
        wf=wf,
        Mv=Mv,
        Pv=Pv,
        Dmodal=Dmodal,
        Qv=Qv,
        Ev=Ev,
        Bf=Bf,
        Q=Q,
        face_points=face_pts,
        face_normals=face_normals,
        face_index=face_index,
        collocated=nodes_match,
        pairs_n=pairs_n,
        pairs_m=pairs_m,
    )


def apply_hadamard_flux_kernel(ops: ElementOperators, G: np.ndarray, flux_matrix_provider):
    """Flux-differencing contraction V^T sum_jk (G (Q o D) - (D o Q^T) G) 1.

    ``G`` holds the metric diagonals on the combined grid, shape (d, d, Nq).
    ``flux_matrix_provider(n, m)`` returns the two-point flux for the ordered
    node pair as an array of shape (d, n_comp).  Only node pairs where some
    Q_i is structurally nonzero are visited; the antisymmetry
    S_j[m, n] = -S_j[n, m] of the metric-weighted operator halves the work.
    """
    d = ops.dim
    n = ops.n_comb
    probe = np.asarray(flux_matrix_provider(0, 0))
    ncomp = probe.shape[1]
    acc = np.zeros((n, ncomp))
    for nn, mm in zip(ops.pairs_n, ops.pairs_m):
        fnm = np.asarray(flux_matrix_provider(nn, mm))
        fmn = np.asarray(flux_matrix_provider(mm, nn))
        for j in range(d):
            s = 0.0
            for k in range(d):
                s += G[j, k, nn] * ops.Q[k][nn, mm] - ops.Q[k][mm, nn] * G[j, k, mm]
            acc[nn] += s * fnm[j]
            acc[mm] -= s * fmn[j]
    return ops.V.T @ acc
