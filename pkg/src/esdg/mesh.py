"""Curvilinear tensor-product meshes on boxes.

Elements are affine images of the reference element, optionally composed
with a smooth warp of the whole box.  Geometry is represented by its
degree-N nodal interpolant, and metric terms come from discretely
differentiating that interpolant, which makes the free-stream metric
identities hold to rounding on every element.

Metric convention: G[i, k] = J * d(xi_k)/d(x_i) (the cofactor matrix of
the coordinate Jacobian), so physical face normals satisfy
J^f n_i = sum_k G^f[i, k] ntilde_k with ntilde the reference normal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import ElementOperators
from .quadrature import tensor_diff_matrices, tensor_vandermonde

__all__ = ["MeshGeometry", "build_box_mesh", "check_gcl", "check_watertight"]

WALL = -1


@dataclass(frozen=True)
class MeshGeometry:
    """Element coordinates, metric terms and face connectivity."""

    dim: int
    n_elements: int
    coords: np.ndarray  # (K, n_coeff, d) nodal coordinates
    xv: np.ndarray  # (K, n_vol, d) volume quadrature points
    xf: np.ndarray  # (K, n_face, d) face quadrature points
    G: np.ndarray  # (K, d, d, n_vol + n_face) metrics at all hybrid nodes
    Jv: np.ndarray  # (K, n_vol) volume Jacobian
    Jf: np.ndarray  # (K, n_face) surface Jacobian
    normals: np.ndarray  # (K, n_face, d) unit outward normals
    exterior_elem: np.ndarray  # (K, n_face) neighbor element, WALL at walls
    exterior_node: np.ndarray  # (K, n_face) matching face node in neighbor

    @property
    def Gv(self) -> np.ndarray:
        nv = self.xv.shape[1]
        return self.G[..., :nv]

    @property
    def Gf(self) -> np.ndarray:
        nv = self.xv.shape[1]
        return self.G[..., nv:]

    def min_node_spacing(self) -> float:
        """Smallest distance between distinct interpolation nodes anywhere."""
        best = np.inf
        for e in range(self.n_elements):
            x = self.coords[e]
            diff = x[:, None, :] - x[None, :, :]
            dist = np.sqrt(np.sum(diff * diff, axis=-1))
            dist[dist == 0.0] = np.inf
            best = min(best, dist.min())
        return best


def _structured_connectivity(shape, periodic, n_fp):
    """Face-to-face neighbor tables for a structured box of quads/intervals.

    Faces are ordered (xi_1-, xi_1+) then, in 2D, (xi_2-, xi_2+); face
    nodes on both sides of a conforming face are sorted by the same
    tangential coordinate, so matched nodes share their in-face index.
    """
    d = len(shape)
    K = int(np.prod(shape))
    n_face = 2 * d * n_fp
    ext_elem = np.full((K, n_face), WALL, dtype=np.int64)
    ext_node = np.tile(np.arange(n_face), (K, 1))

    def elem_id(idx):
        return idx[0] if d == 1 else idx[0] + shape[0] * idx[1]

    for e in range(K):
        idx = [e % shape[0]] if d == 1 else [e % shape[0], e // shape[0]]
        for axis in range(d):
            for side, step in ((0, -1), (1, +1)):
                nb = list(idx)
                nb[axis] += step
                if nb[axis] < 0 or nb[axis] >= shape[axis]:
                    if not periodic[axis]:
                        continue
                    nb[axis] %= shape[axis]
                face = 2 * axis + side
                opposite = 2 * axis + (1 - side)
                rows = face * n_fp + np.arange(n_fp)
                ext_elem[e, rows] = elem_id(nb)
                ext_node[e, rows] = opposite * n_fp + np.arange(n_fp)
    return ext_elem, ext_node


def build_box_mesh(
    ops: ElementOperators,
    lower,
    upper,
    n_elements,
    periodic=None,
    warp=None,
) -> MeshGeometry:
    """Mesh a box [lower, upper] with a structured grid of elements.

    ``warp`` is an optional smooth map x -> xtilde applied to the nodal
    coordinates; the mesh stores its degree-N interpolant.
    """
    d = ops.dim
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    shape = tuple(np.atleast_1d(np.asarray(n_elements, dtype=int)))
    if len(lower) != d or len(upper) != d or len(shape) != d:
        raise ValueError("lower/upper/n_elements must all have length dim")
    if np.any(upper <= lower) or any(k < 1 for k in shape):
        raise ValueError("degenerate box or element count")
    periodic = (False,) * d if periodic is None else tuple(periodic)

    h = (upper - lower) / np.asarray(shape, dtype=float)
    ref = ops.basis.nodes
    if d == 1:
        ref_nodes = ref[:, None]
    else:
        ref_nodes = np.stack(
            [np.tile(ref, ref.size), np.repeat(ref, ref.size)], axis=1
        )

    K = int(np.prod(shape))
    coords = np.empty((K, ref_nodes.shape[0], d))
    for e in range(K):
        idx = np.array([e % shape[0]] if d == 1 else [e % shape[0], e // shape[0]])
        origin = lower + idx * h
        coords[e] = origin + 0.5 * (ref_nodes + 1.0) * h
    if warp is not None:
        flat = coords.reshape(-1, d)
        coords = np.asarray(warp(flat), dtype=float).reshape(coords.shape)

    D = tensor_diff_matrices(ops.basis, d)
    Vall = ops.V  # stacked volume+face Vandermonde
    nv, nf = ops.n_vol, ops.n_face
    # dx[i, j] = d(x_i)/d(xi_j) at every hybrid node, per element
    dx = np.empty((K, d, d, nv + nf))
    for e in range(K):
        for j in range(d):
            dcoef = D[j] @ coords[e]
            at = Vall @ dcoef
            for i in range(d):
                dx[e, i, j] = at[:, i]

    G = np.empty_like(dx)
    if d == 1:
        G[:, 0, 0, :] = 1.0
        Jall = dx[:, 0, 0, :]
    else:
        G[:, 0, 0] = dx[:, 1, 1]
        G[:, 0, 1] = -dx[:, 1, 0]
        G[:, 1, 0] = -dx[:, 0, 1]
        G[:, 1, 1] = dx[:, 0, 0]
        Jall = dx[:, 0, 0] * dx[:, 1, 1] - dx[:, 0, 1] * dx[:, 1, 0]
    if np.any(Jall <= 0.0):
        raise ValueError("mesh map is not orientation preserving (J <= 0)")

    # physical face normals from the reference ones
    nref = ops.face_normals  # (nf, d)
    scaled = np.einsum("eikq,qk->eqi", G[..., nv:], nref)
    Jf = np.sqrt(np.sum(scaled * scaled, axis=-1))
    normals = scaled / Jf[..., None]

    xv = np.einsum("qm,emd->eqd", ops.Vv, coords)
    xf = np.einsum("qm,emd->eqd", ops.Vf, coords)
    ext_elem, ext_node = _structured_connectivity(
        shape, periodic, ops.face_index.shape[1]
    )
    return MeshGeometry(
        dim=d,
        n_elements=K,
        coords=coords,
        xv=xv,
        xf=xf,
        G=G,
        Jv=Jall[:, :nv],
        Jf=Jf,
        normals=normals,
        exterior_elem=ext_elem,
        exterior_node=ext_node,
    )


def check_gcl(ops: ElementOperators, mesh: MeshGeometry) -> float:
    """Max residual of the discrete metric identities sum_k Q_k G_jk 1 = 0."""
    worst = 0.0
    for e in range(mesh.n_elements):
        for j in range(ops.dim):
            r = np.zeros(ops.n_vol + ops.n_face)
            for k in range(ops.dim):
                r += ops.Q[k] @ mesh.G[e, j, k]
            worst = max(worst, np.abs(r).max())
    return worst


def check_watertight(mesh: MeshGeometry) -> float:
    """Max coordinate mismatch between matched face quadrature points."""
    worst = 0.0
    for e in range(mesh.n_elements):
        nb = mesh.exterior_elem[e]
        interior = nb != WALL
        if not np.any(interior):
            continue
        mine = mesh.xf[e][interior]
        theirs = mesh.xf[nb[interior], mesh.exterior_node[e][interior]]
        # periodic wraps shift coordinates by the box extent; compare modulo
        diff = np.abs(mine - theirs)
        if diff.max() > 1e-8:
            extent = mesh.coords.reshape(-1, mesh.dim)
            span = extent.max(axis=0) - extent.min(axis=0)
            diff = np.minimum(diff, np.abs(diff - span))
        worst = max(worst, diff.max())
    return worst
