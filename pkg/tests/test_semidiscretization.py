import numpy as np
import pytest

from esdg.euler import GasParameters, entropy_variables
from esdg.mesh import build_box_mesh
from esdg.operators import build_element_operators
from esdg.quadrature import NodalBasis, gauss_rule, lgl_rule, tensor_product_rule
from esdg.semidiscretization import Semidiscretization


def make(N, d, kind, elements, periodic, warp=None, lower=None, upper=None):
    basis = NodalBasis(N)
    rule = lgl_rule(N + 1) if kind == "lgl" else gauss_rule(N + 2)
    vol = tensor_product_rule(rule, d)
    face = rule if d == 2 else None
    ops = build_element_operators(basis, vol, face, d)
    lower = lower or (0.0,) * d
    upper = upper or (1.0,) * d
    mesh = build_box_mesh(ops, lower, upper, elements, periodic=periodic, warp=warp)
    return ops, mesh


def warp2(x):
    y1 = x[:, 0] + 0.06 * np.sin(2 * np.pi * x[:, 0]) * np.sin(2 * np.pi * x[:, 1])
    y2 = x[:, 1] - 0.05 * np.sin(2 * np.pi * x[:, 0]) * np.sin(2 * np.pi * x[:, 1])
    return np.stack([y1, y2], axis=1)


def smooth_state(mesh, ops, gas, d):
    x = mesh.xv
    rho = 1.0 + 0.3 * np.sin(2 * np.pi * x[..., 0])
    u1 = 0.4 + 0.1 * np.cos(2 * np.pi * x[..., 0])
    p = 1.0 + 0.2 * np.sin(2 * np.pi * x[..., 0])
    if d == 2:
        rho = rho + 0.1 * np.cos(2 * np.pi * x[..., 1])
        p = p + 0.1 * np.sin(2 * np.pi * x[..., 1])
    phi = np.asarray(gas.geopotential(x))
    q = np.zeros(x.shape[:-1] + (d + 2,))
    q[..., 0] = rho
    q[..., 1] = rho * u1
    q[..., -1] = p / (gas.gamma - 1) + rho * phi + 0.5 * rho * u1**2
    return q


@pytest.mark.parametrize("kind", ["lgl", "gauss"])
def test_free_stream_warped(kind):
    ops, mesh = make(3, 2, kind, (4, 4), (True, True), warp=warp2)
    sd = Semidiscretization(ops, mesh, GasParameters(), flux="es")
    q = np.zeros((mesh.n_elements, ops.n_coeff, 4))
    q[..., 0] = 1.3
    q[..., 1] = 0.5
    q[..., 2] = -0.2
    q[..., 3] = 2.0
    assert np.abs(sd.rhs(q)).max() < 1e-11


@pytest.mark.parametrize("kind", ["lgl", "gauss"])
@pytest.mark.parametrize("d", [1, 2])
def test_ec_semidiscrete_entropy_conservation(d, kind):
    """<beta_hat, M dq/dt> = 0 for the EC flux on periodic meshes,
    including a geopotential."""
    gas = GasParameters(geopotential=lambda x: 0.5 * x[..., 0])
    ops, mesh = make(3, d, kind, (4, 4)[:d], (True,) * d, warp=warp2 if d == 2 else None)
    sd = Semidiscretization(ops, mesh, gas, flux="ec")
    q = sd.project(smooth_state(mesh, ops, gas, d))
    wr = sd.rhs_weighted(q)
    rate = sd.entropy_pairing(q, wr)
    assert abs(rate) < 1e-11


@pytest.mark.parametrize("kind", ["lgl", "gauss"])
def test_es_semidiscrete_entropy_decay(kind):
    gas = GasParameters(geopotential=lambda x: 0.5 * x[..., 0])
    d = 2
    ops, mesh = make(3, d, kind, (4, 4), (True, True), warp=warp2)
    sd = Semidiscretization(ops, mesh, gas, flux="es")
    q = sd.project(smooth_state(mesh, ops, gas, d))
    rate = sd.entropy_pairing(q, sd.rhs_weighted(q))
    assert rate < 1e-12


@pytest.mark.parametrize("flux", ["ec", "es"])
def test_semidiscrete_conservation(flux):
    """Mass and total energy rates vanish on periodic meshes even with
    gravity; the geopotential-momentum exchange is inside rho e."""
    gas = GasParameters(geopotential=lambda x: 0.7 * x[..., 1])
    ops, mesh = make(3, 2, "lgl", (4, 4), (True, True), warp=warp2)
    sd = Semidiscretization(ops, mesh, gas, flux=flux)
    q = sd.project(smooth_state(mesh, ops, gas, 2))
    wr = sd.rhs_weighted(q)
    # sum over all coefficients of M dq/dt = d/dt integral q
    one = np.ones((mesh.n_elements, ops.n_coeff))
    for c in (0, 3):
        rate = float(np.sum(one * wr[..., c]))
        assert abs(rate) < 1e-12 * max(1.0, np.abs(wr).max())


def test_momentum_not_conserved_with_gravity():
    gas = GasParameters(geopotential=lambda x: 0.7 * x[..., 1])
    ops, mesh = make(3, 2, "lgl", (4, 4), (True, True))
    sd = Semidiscretization(ops, mesh, gas, flux="ec")
    q = sd.project(smooth_state(mesh, ops, gas, 2))
    wr = sd.rhs_weighted(q)
    rate = float(np.sum(wr[..., 2]))
    assert abs(rate) > 1e-8  # gravity exerts net vertical force


def test_collocated_projection_identity():
    """On LGL grids the entropy-projected volume state is the nodal state."""
    gas = GasParameters(geopotential=lambda x: 0.5 * x[..., 0])
    ops, mesh = make(4, 2, "lgl", (3, 3), (True, True))
    sd = Semidiscretization(ops, mesh, gas, flux="ec")
    q = sd.project(smooth_state(mesh, ops, gas, 2))
    qv = sd.evaluate(q)
    qtilde, _ = sd.entropy_projected_state(qv)
    assert np.abs(qtilde[:, : ops.n_vol] - qv).max() < 1e-14


def test_entropy_projection_is_l2_projection_of_beta():
    gas = GasParameters(geopotential=lambda x: 0.5 * x[..., 0])
    ops, mesh = make(3, 2, "gauss", (3, 3), (True, True), warp=warp2)
    sd = Semidiscretization(ops, mesh, gas, flux="ec")
    q = sd.project(smooth_state(mesh, ops, gas, 2))
    qv = sd.evaluate(q)
    beta = entropy_variables(qv, sd.phi_v, gas.gamma)
    bhat = sd.entropy_coefficients(qv)
    # Galerkin orthogonality: V_v^T W_J (beta - V_v bhat) = 0
    resid = np.einsum(
        "qm,eq,eqc->emc", ops.Vv, sd.wJv, beta - np.einsum("qm,emc->eqc", ops.Vv, bhat)
    )
    assert np.abs(resid).max() < 1e-11


def test_wall_mirror_trace():
    gas = GasParameters(geopotential=lambda x: 0.5 * x[..., 1])
    ops, mesh = make(3, 2, "lgl", (3, 3), (True, False))
    sd = Semidiscretization(ops, mesh, gas, flux="ec")
    q = sd.project(smooth_state(mesh, ops, gas, 2))
    qv = sd.evaluate(q)
    qtilde, _ = sd.entropy_projected_state(qv)
    qf = qtilde[:, ops.n_vol :, :]
    qp, phip = sd.exterior_trace(qf)
    wall = sd.wall_mask
    n = mesh.normals[wall]
    # normal momentum flips, tangential and scalars copy
    mom_m, mom_p = qf[wall][:, 1:3], qp[wall][:, 1:3]
    un_m = np.sum(mom_m * n, axis=1)
    un_p = np.sum(mom_p * n, axis=1)
    assert np.abs(un_m + un_p).max() < 1e-13
    t = np.stack([-n[:, 1], n[:, 0]], axis=1)
    assert np.abs(np.sum((mom_m - mom_p) * t, axis=1)).max() < 1e-13
    assert np.abs(qf[wall][:, 0] - qp[wall][:, 0]).max() == 0.0
    assert np.abs(qf[wall][:, 3] - qp[wall][:, 3]).max() == 0.0
    assert np.abs(phip[wall] - sd.phi_f[wall]).max() == 0.0


def test_wall_no_mass_or_energy_flux():
    """With mirror ghosts the EC wall flux moves only normal momentum."""
    gas = GasParameters(geopotential=lambda x: 0.5 * x[..., 1])
    ops, mesh = make(3, 2, "lgl", (3, 3), (True, False))
    sd = Semidiscretization(ops, mesh, gas, flux="ec")
    q = sd.project(smooth_state(mesh, ops, gas, 2))
    qtilde, _ = sd.entropy_projected_state(sd.evaluate(q))
    fstar = sd._surface_flux(qtilde[:, ops.n_vol :, :])
    wall = sd.wall_mask
    assert np.abs(fstar[wall][:, 0]).max() < 1e-13
    assert np.abs(fstar[wall][:, 3]).max() < 1e-13


def test_rhs_and_weighted_rhs_consistent():
    gas = GasParameters(geopotential=lambda x: 0.5 * x[..., 0])
    ops, mesh = make(3, 2, "gauss", (3, 3), (True, True), warp=warp2)
    sd = Semidiscretization(ops, mesh, gas, flux="es")
    q = sd.project(smooth_state(mesh, ops, gas, 2))
    r = sd.rhs(q)
    wr = sd.rhs_weighted(q)
    assert np.abs(sd.apply_mass(r) - wr).max() < 1e-12 * max(1.0, np.abs(wr).max())


def test_coriolis_in_rhs():
    gas = GasParameters()
    ops, mesh = make(2, 2, "lgl", (3, 3), (True, True))
    sd0 = Semidiscretization(ops, mesh, gas, flux="ec")
    sdw = Semidiscretization(ops, mesh, gas, flux="ec", omega=(0.0, 0.0, 0.5))
    q = sd0.project(smooth_state(mesh, ops, gas, 2))
    diff = sdw.rhs_weighted(q) - sd0.rhs_weighted(q)
    qv = sd0.evaluate(q)
    u = qv[..., 1:3] / qv[..., :1]
    from esdg.euler import coriolis_source

    src = coriolis_source(qv, (0.0, 0.0, 0.5))
    want = np.einsum("qm,eqc->emc", ops.Vv, sd0.wJv[..., None] * src)
    assert np.abs(diff - want).max() < 1e-13
