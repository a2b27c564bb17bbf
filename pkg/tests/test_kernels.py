import numpy as np
import pytest

from esdg import kernels
from esdg.kernels import numpy_impl
from esdg.mesh import build_box_mesh
from esdg.operators import build_element_operators
from esdg.quadrature import NodalBasis, gauss_rule, lgl_rule, tensor_product_rule
from conftest import random_states

numba_impl = pytest.importorskip("esdg.kernels.numba_impl")


def setup(N=3, d=2, kind="lgl", elements=(3, 3), warp=None):
    basis = NodalBasis(N)
    rule = lgl_rule(N + 1) if kind == "lgl" else gauss_rule(N + 2)
    vol = tensor_product_rule(rule, d)
    face = rule if d == 2 else None
    ops = build_element_operators(basis, vol, face, d)
    lower = (0.0,) * d
    upper = (1.0,) * d
    mesh = build_box_mesh(
        ops, lower, upper, elements[:d], periodic=(True,) * d, warp=warp
    )
    return ops, mesh


def warp2(x):
    y1 = x[:, 0] + 0.05 * np.sin(2 * np.pi * x[:, 0]) * np.sin(2 * np.pi * x[:, 1])
    y2 = x[:, 1] - 0.04 * np.sin(2 * np.pi * x[:, 0]) * np.sin(2 * np.pi * x[:, 1])
    return np.stack([y1, y2], axis=1)


@pytest.mark.parametrize("kind", ["lgl", "gauss"])
@pytest.mark.parametrize("d", [1, 2])
def test_hadamard_sum_backends_agree(d, kind, rng):
    ops, mesh = setup(d=d, kind=kind, elements=(3, 3), warp=warp2 if d == 2 else None)
    prep = kernels.prepare(ops)
    K, n = mesh.n_elements, ops.n_comb
    q, phi = random_states(rng, K * n, d)
    q = q.reshape(K, n, d + 2)
    phi = phi.reshape(K, n)
    a1 = numpy_impl.hadamard_sum(q, phi, mesh.G, prep, 1.4)
    a2 = numba_impl.hadamard_sum(q, phi, mesh.G, prep, 1.4)
    scale = np.abs(a1).max()
    assert np.abs(a1 - a2).max() / scale < 1e-13


def test_surface_flux_backends_agree(rng):
    from esdg.euler import GasParameters
    from esdg.semidiscretization import Semidiscretization

    ops, mesh = setup(d=2, kind="lgl", elements=(3, 3), warp=warp2)
    gas = GasParameters(geopotential=lambda x: 0.3 * x[..., 1])
    for flux in ("ec", "es"):
        sd_np = Semidiscretization(ops, mesh, gas, flux=flux, backend="numpy")
        sd_nb = Semidiscretization(ops, mesh, gas, flux=flux, backend="numba")
        q, _ = random_states(rng, mesh.n_elements * ops.n_face, 2)
        qf = q.reshape(mesh.n_elements, ops.n_face, 4)
        # replace the geopotential trace with the actual mesh values
        f1 = sd_np._surface_flux(qf)
        f2 = sd_nb._surface_flux(qf)
        scale = np.abs(f1).max()
        assert np.abs(f1 - f2).max() / scale < 1e-13


def test_surface_flux_backends_agree_with_walls(rng):
    from esdg.euler import GasParameters
    from esdg.semidiscretization import Semidiscretization
    from esdg.quadrature import NodalBasis

    basis = NodalBasis(3)
    rule = lgl_rule(4)
    ops = build_element_operators(basis, tensor_product_rule(rule, 2), rule, 2)
    mesh = build_box_mesh(
        ops, (0.0, 0.0), (1.0, 1.0), (3, 3), periodic=(True, False)
    )
    gas = GasParameters(geopotential=lambda x: 0.3 * x[..., 1])
    sd_np = Semidiscretization(ops, mesh, gas, flux="es", backend="numpy")
    sd_nb = Semidiscretization(ops, mesh, gas, flux="es", backend="numba")
    q, _ = random_states(rng, mesh.n_elements * ops.n_face, 2)
    qf = q.reshape(mesh.n_elements, ops.n_face, 4)
    f1 = sd_np._surface_flux(qf)
    f2 = sd_nb._surface_flux(qf)
    assert np.abs(f1 - f2).max() / np.abs(f1).max() < 1e-13


def test_backend_selection(monkeypatch):
    fn, name = kernels.get_backend("numpy")
    assert name == "numpy" and fn is numpy_impl.hadamard_sum
    fn, name = kernels.get_backend("numba")
    assert name == "numba"
    monkeypatch.setenv("ESDG_KERNELS", "numpy")
    _, name = kernels.get_backend(None)
    assert name == "numpy"
    monkeypatch.setenv("ESDG_KERNELS", "auto")
    _, name = kernels.get_backend(None)
    assert name == "numba"
