"""Entropy-stable flux-differencing semidiscretization.

The spatial operator evaluates, per element,

    M dq/dt = -V^T acc(qtilde) - Vf^T diag(wf Jf) f*  + source,

where acc is the Hadamard sum of the entropy-conservative two-point
flux against the skew-hybridized operator (volume module), f* the
interface flux, and qtilde the entropy-projected evaluation state.
All one-sided flux contributions cancel between the face rows of the
volume term and the surface term, so neither is formed explicitly.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .euler import (
    GasParameters,
    ec_flux,
    entropy,
    entropy_variables,
    es_surface_flux,
    coriolis_source,
    state_from_entropy_variables,
)
from .mesh import WALL, MeshGeometry
from .operators import ElementOperators

__all__ = ["Semidiscretization"]


class Semidiscretization:
    """Couples element operators, mesh geometry and the gas law.

    ``flux`` selects the interface flux: "ec" (entropy conservative)
    or "es" (with matrix dissipation).  ``omega`` is an optional
    constant rotation vector for the Coriolis source.
    """

    def __init__(
        self,
        ops: ElementOperators,
        mesh: MeshGeometry,
        gas: GasParameters,
        flux: str = "ec",
        omega=None,
        backend: str | None = None,
    ):
        if flux not in ("ec", "es"):
            raise ValueError(f"unknown interface flux {flux!r}")
        if ops.dim != mesh.dim:
            raise ValueError("operator and mesh dimensions differ")
        self.ops = ops
        self.mesh = mesh
        self.gas = gas
        self.flux = flux
        self.omega = None if omega is None else np.asarray(omega, dtype=float)
        self.hadamard_sum, self.backend = kernels.get_backend(backend)
        self.prep = kernels.prepare(ops)

        self.phi_v = np.asarray(gas.geopotential(mesh.xv.reshape(-1, mesh.dim)))
        self.phi_v = self.phi_v.reshape(mesh.n_elements, ops.n_vol)
        self.phi_f = np.asarray(gas.geopotential(mesh.xf.reshape(-1, mesh.dim)))
        self.phi_f = self.phi_f.reshape(mesh.n_elements, ops.n_face)
        self.phi_all = np.concatenate([self.phi_v, self.phi_f], axis=1)

        wJ = ops.wv[None, :] * mesh.Jv  # (K, n_vol)
        self.wJv = wJ
        self.wJf = ops.wf[None, :] * mesh.Jf
        if ops.collocated:
            self.M = None
            self.Minv = None
        else:
            self.M = np.einsum("qm,eq,qn->emn", ops.Vv, wJ, ops.Vv)
            self.Minv = np.linalg.inv(self.M)
            # J-weighted projection onto the modal space
            self.proj = np.einsum("emn,qn,eq->emq", self.Minv, ops.Vv, wJ)

        ee = mesh.exterior_elem
        self.wall_mask = ee == WALL
        self.ext_elem = np.where(self.wall_mask, 0, ee)
        self.ext_node = mesh.exterior_node

    # -- state representations ------------------------------------------

    def evaluate(self, qhat: np.ndarray) -> np.ndarray:
        """Solution values at the volume quadrature points."""
        if self.ops.collocated:
            return qhat
        return np.einsum("qm,emc->eqc", self.ops.Vv, qhat)

    def project(self, qv: np.ndarray) -> np.ndarray:
        """L2-project point values back to coefficients."""
        if self.ops.collocated:
            return qv
        return np.einsum("emq,eqc->emc", self.proj, qv)

    def entropy_coefficients(self, qv: np.ndarray) -> np.ndarray:
        beta_v = entropy_variables(qv, self.phi_v, self.gas.gamma)
        return self.project(beta_v)

    def entropy_projected_state(self, qv: np.ndarray):
        """Evaluation state at all hybrid nodes via the entropy projection."""
        beta_hat = self.entropy_coefficients(qv)
        if self.ops.collocated:
            beta_f = np.einsum("fm,emc->efc", self.ops.Vf, beta_hat)
            qf = state_from_entropy_variables(beta_f, self.phi_f, self.gas.gamma)
            qtilde = np.concatenate([qv, qf], axis=1)
        else:
            beta_all = np.einsum("nm,emc->enc", self.ops.V, beta_hat)
            qtilde = state_from_entropy_variables(
                beta_all, self.phi_all, self.gas.gamma
            )
        return qtilde, beta_hat

    # -- boundary handling ----------------------------------------------

    def exterior_trace(self, qf: np.ndarray):
        """Exterior states and geopotential, with mirror ghosts at walls."""
        qp = qf[self.ext_elem, self.ext_node]
        phip = self.phi_f[self.ext_elem, self.ext_node]
        wall = self.wall_mask
        if np.any(wall):
            n = self.mesh.normals[wall]
            ghost = qf[wall].copy()
            mom = ghost[:, 1:-1]
            ghost[:, 1:-1] = mom - 2.0 * np.sum(mom * n, axis=-1, keepdims=True) * n
            qp[wall] = ghost
            phip[wall] = self.phi_f[wall]
        return qp, phip

    def _surface_flux(self, qf: np.ndarray) -> np.ndarray:
        """Normal interface flux at every face node of every element."""
        gam = self.gas.gamma
        n = self.mesh.normals
        if self.backend == "numba":
            from .kernels import numba_impl

            return numba_impl.surface_flux(
                qf,
                self.phi_f,
                self.ext_elem,
                self.ext_node,
                self.wall_mask,
                n,
                self.flux == "es",
                gam,
            )
        qp, phip = self.exterior_trace(qf)
        if self.flux == "es":
            return es_surface_flux(qf, self.phi_f, qp, phip, n, gam)
        fstar = np.zeros_like(qf)
        for k in range(self.mesh.dim):
            fstar += n[..., k : k + 1] * ec_flux(qf, self.phi_f, qp, phip, k, gam)
        return fstar

    # -- right-hand side --------------------------------------------------

    def rhs_weighted(self, qhat: np.ndarray) -> np.ndarray:
        """The mass-matrix-weighted right-hand side M dq/dt."""
        ops, mesh, gam = self.ops, self.mesh, self.gas.gamma
        qv = self.evaluate(qhat)
        qtilde, _ = self.entropy_projected_state(qv)

        acc = self.hadamard_sum(qtilde, self.phi_all, mesh.G, self.prep, gam)

        qf = qtilde[:, ops.n_vol :, :]
        fstar = self._surface_flux(qf)

        out = -np.einsum("nm,enc->emc", ops.V, acc)
        out -= np.einsum("fm,efc->emc", ops.Vf, self.wJf[..., None] * fstar)
        if self.omega is not None:
            src = coriolis_source(qv, self.omega)
            out += np.einsum("qm,eqc->emc", ops.Vv, self.wJv[..., None] * src)
        return out

    def rhs(self, qhat: np.ndarray) -> np.ndarray:
        out = self.rhs_weighted(qhat)
        if self.ops.collocated:
            return out / self.wJv[..., None]
        return np.einsum("emn,enc->emc", self.Minv, out)

    def apply_mass(self, v: np.ndarray) -> np.ndarray:
        if self.ops.collocated:
            return self.wJv[..., None] * v
        return np.einsum("emn,enc->emc", self.M, v)

    def solve_mass(self, v: np.ndarray) -> np.ndarray:
        if self.ops.collocated:
            return v / self.wJv[..., None]
        return np.einsum("emn,enc->emc", self.Minv, v)

    # -- functionals ------------------------------------------------------

    def total_entropy(self, qhat: np.ndarray) -> float:
        qv = self.evaluate(qhat)
        return float(np.sum(self.wJv * entropy(qv, self.phi_v, self.gas.gamma)))

    def integrals(self, qhat: np.ndarray) -> np.ndarray:
        """Integrals of the conserved variables over the domain."""
        qv = self.evaluate(qhat)
        return np.einsum("eq,eqc->c", self.wJv, qv)

    def entropy_pairing(self, qhat: np.ndarray, weighted_rhs: np.ndarray) -> float:
        """<beta_N(q), M dq/dt>, the discrete entropy production rate."""
        beta_hat = self.entropy_coefficients(self.evaluate(qhat))
        return float(np.sum(beta_hat * weighted_rhs))

    def entropy_derivative(self, q0: np.ndarray, dq: np.ndarray, g: float) -> float:
        """d/dgamma of S(q0 + gamma dq) at gamma = g."""
        qv = self.evaluate(q0 + g * dq)
        beta = entropy_variables(qv, self.phi_v, self.gas.gamma)
        dqv = self.evaluate(dq)
        return float(np.sum(self.wJv[..., None] * beta * dqv))
