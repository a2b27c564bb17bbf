import numpy as np
import pytest

from esdg.mesh import (
    WALL,
    build_box_mesh,
    check_gcl,
    check_watertight,
)
from esdg.operators import build_element_operators
from esdg.quadrature import NodalBasis, gauss_rule, lgl_rule, tensor_product_rule


def make_ops(N, d, kind="lgl"):
    basis = NodalBasis(N)
    rule = lgl_rule(N + 1) if kind == "lgl" else gauss_rule(N + 2)
    vol = tensor_product_rule(rule, d)
    face = rule if d == 2 else None
    return build_element_operators(basis, vol, face, d)


def bubble_warp(x):
    # smooth warp used by the 2-D thermal test meshes
    lx, ly = 2000.0, 2000.0
    x1 = x[:, 0] + 1000.0
    y1 = x1 + (lx / 5) * np.sin(np.pi * x1 / lx) * np.sin(np.pi * x[:, 1] / ly)
    y2 = x[:, 1] + (ly / 5) * np.sin(2 * np.pi * x1 / lx) * np.sin(
        np.pi * x[:, 1] / ly
    )
    return np.stack([y1 - 1000.0, y2], axis=1)


def test_affine_1d_jacobian():
    ops = make_ops(4, 1)
    mesh = build_box_mesh(ops, (0.0,), (1.0,), (32,), periodic=(False,))
    assert np.abs(mesh.Jv - 1.0 / 64.0).max() < 1e-14
    assert mesh.n_elements == 32
    assert np.abs(mesh.Jf - 1.0).max() < 1e-14


def test_1d_wall_connectivity():
    ops = make_ops(2, 1)
    mesh = build_box_mesh(ops, (0.0,), (1.0,), (4,), periodic=(False,))
    assert mesh.exterior_elem[0, 0] == WALL
    assert mesh.exterior_elem[-1, -1] == WALL
    assert mesh.exterior_elem[1, 0] == 0 and mesh.exterior_elem[1, 1] == 2


def test_periodic_connectivity_2d():
    ops = make_ops(3, 2)
    mesh = build_box_mesh(
        ops, (0.0, 0.0), (1.0, 1.0), (3, 3), periodic=(True, True)
    )
    assert not np.any(mesh.exterior_elem == WALL)
    assert check_watertight(mesh) < 1e-12


def test_normals_unit_and_outward():
    ops = make_ops(3, 2)
    mesh = build_box_mesh(
        ops, (0.0, 0.0), (2.0, 1.0), (4, 4), periodic=(False, False)
    )
    norms = np.linalg.norm(mesh.normals, axis=-1)
    assert np.abs(norms - 1.0).max() < 1e-13
    # on the unwarped box the faces align with the axes
    face0 = ops.face_index[0]
    assert np.allclose(mesh.normals[0, face0], [-1.0, 0.0])


def test_gcl_warped_mesh():
    ops = make_ops(4, 2)
    mesh = build_box_mesh(
        ops,
        (-1000.0, 0.0),
        (1000.0, 2000.0),
        (10, 10),
        periodic=(True, False),
        warp=bubble_warp,
    )
    scale = max(np.abs(mesh.G).max(), 1.0)
    assert check_gcl(ops, mesh) / scale < 1e-12
    assert check_watertight(mesh) < 1e-8


def test_gauss_warped_mesh_gcl():
    ops = make_ops(3, 2, kind="gauss")
    mesh = build_box_mesh(
        ops,
        (-1000.0, 0.0),
        (1000.0, 2000.0),
        (5, 5),
        periodic=(True, False),
        warp=bubble_warp,
    )
    scale = max(np.abs(mesh.G).max(), 1.0)
    assert check_gcl(ops, mesh) / scale < 1e-12


def test_negative_jacobian_raises():
    ops = make_ops(2, 2)

    def fold(x):
        # non-invertible map: collapses x1
        return np.stack([0.0 * x[:, 0], x[:, 1]], axis=1)

    with pytest.raises(ValueError):
        build_box_mesh(
            ops, (0.0, 0.0), (1.0, 1.0), (2, 2), periodic=(True, True), warp=fold
        )


def test_min_node_spacing_1d():
    ops = make_ops(4, 1)
    mesh = build_box_mesh(ops, (0.0,), (1.0,), (32,), periodic=(False,))
    gap = np.diff(ops.basis.nodes).min() * (1.0 / 32.0) / 2.0
    assert abs(mesh.min_node_spacing() - gap) < 1e-14


def test_volume_adds_up_when_warped():
    ops = make_ops(4, 2)
    mesh = build_box_mesh(
        ops,
        (-1000.0, 0.0),
        (1000.0, 2000.0),
        (10, 10),
        periodic=(True, False),
        warp=bubble_warp,
    )
    vol = float(np.sum(ops.wv[None, :] * mesh.Jv))
    assert abs(vol - 2000.0 * 2000.0) / 4e6 < 1e-12
