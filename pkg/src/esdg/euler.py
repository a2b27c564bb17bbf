"""Compressible Euler equations with gravity: state algebra and fluxes.

States are stored as (..., d+2) arrays ordered (rho, rho*u_1..rho*u_d,
rho*e); entropy variables use the matching layout with the last slot
equal to -2b, b = rho/(2p).  The geopotential enters through
precomputed nodal values, so every function below takes phi values
rather than coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "AdmissibilityError",
    "GasParameters",
    "RotationField",
    "pressure",
    "entropy",
    "entropy_flux",
    "entropy_variables",
    "state_from_entropy_variables",
    "log_mean",
    "ec_flux",
    "physical_flux",
    "coriolis_source",
    "matrix_dissipation",
    "es_surface_flux",
    "max_wave_speed",
]


class AdmissibilityError(ValueError):
    """Raised when a state has nonpositive density or pressure."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class GasParameters:
    """Ideal-gas constants and the geopotential of the problem."""

    gamma: float = 7.0 / 5.0
    R_d: float = 287.0
    geopotential: Callable[[np.ndarray], np.ndarray] = field(
        default=lambda x: np.zeros(np.asarray(x).shape[:-1])
    )

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")

    @property
    def c_p(self) -> float:
        return self.gamma * self.R_d / (self.gamma - 1.0)

    @property
    def c_v(self) -> float:
        return self.R_d / (self.gamma - 1.0)


@dataclass(frozen=True)
class RotationField:
    """Planetary rotation vector omega(x); zero by default."""

    omega: Callable[[np.ndarray], np.ndarray] | None = None


def _split(q: np.ndarray):
    rho = q[..., 0]
    rhou = q[..., 1:-1]
    rhoe = q[..., -1]
    return rho, rhou, rhoe


def pressure(q: np.ndarray, phi, gamma: float = 1.4, check: bool = True) -> np.ndarray:
    """p = (gamma-1)(rho e - rho phi - |rho u|^2 / (2 rho))."""
    rho, rhou, rhoe = _split(np.asarray(q, dtype=float))
    if check and np.any(rho <= 0.0):
        raise AdmissibilityError("nonpositive density", state=q)
    p = (gamma - 1.0) * (rhoe - rho * phi - 0.5 * np.sum(rhou * rhou, axis=-1) / rho)
    if check and np.any(p <= 0.0):
        bad = np.argmin(p) if np.ndim(p) else None
        raise AdmissibilityError(f"nonpositive pressure (worst index {bad})", state=q)
    return p


def entropy(q: np.ndarray, phi, gamma: float = 1.4) -> np.ndarray:
    """Mathematical entropy -rho s / (gamma - 1), s = log(p / rho^gamma)."""
    rho = np.asarray(q, dtype=float)[..., 0]
    p = pressure(q, phi, gamma)
    s = np.log(p) - gamma * np.log(rho)
    return -rho * s / (gamma - 1.0)


def entropy_flux(q: np.ndarray, phi, k: int, gamma: float = 1.4) -> np.ndarray:
    """Entropy flux zeta_k = u_k * eta."""
    q = np.asarray(q, dtype=float)
    return q[..., 1 + k] / q[..., 0] * entropy(q, phi, gamma)


def entropy_variables(q: np.ndarray, phi, gamma: float = 1.4) -> np.ndarray:
    """Gradient of the entropy with respect to the conservative state."""
    q = np.asarray(q, dtype=float)
    rho, rhou, _ = _split(q)
    p = pressure(q, phi, gamma)
    u = rhou / rho[..., None]
    b = 0.5 * rho / p
    s = np.log(p) - gamma * np.log(rho)
    beta = np.empty_like(q)
    beta[..., 0] = (gamma - s) / (gamma - 1.0) - (
        np.sum(u * u, axis=-1) - 2.0 * np.asarray(phi)
    ) * b
    beta[..., 1:-1] = 2.0 * b[..., None] * u
    beta[..., -1] = -2.0 * b
    return beta


def state_from_entropy_variables(beta: np.ndarray, phi, gamma: float = 1.4) -> np.ndarray:
    """Invert entropy variables back to the conservative state."""
    beta = np.asarray(beta, dtype=float)
    b = -0.5 * beta[..., -1]
    if np.any(b <= 0.0):
        raise AdmissibilityError("entropy variables with nonnegative last component")
    u = beta[..., 1:-1] / (2.0 * b[..., None])
    u2 = np.sum(u * u, axis=-1)
    phi = np.asarray(phi)
    rho = (
        2.0 * b * np.exp((gamma - 1.0) * (-beta[..., 0] + (2.0 * phi - u2) * b) + gamma)
    ) ** (-1.0 / (gamma - 1.0))
    e = 1.0 / ((gamma - 1.0) * 2.0 * b) + 0.5 * u2 + phi
    q = np.empty_like(beta)
    q[..., 0] = rho
    q[..., 1:-1] = rho[..., None] * u
    q[..., -1] = rho * e
    return q


# series threshold on the Ismail-Roe zeta parameter
_LOG_MEAN_EPS = 1e-4


def log_mean(a, b):
    """(a-b)/(log a - log b) with a series expansion near a = b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise ValueError("log_mean requires positive arguments")
    zeta = a / b
    f = (zeta - 1.0) / (zeta + 1.0)
    u = f * f
    small = u < _LOG_MEAN_EPS
    series = (a + b) / (2.0 + u * (2.0 / 3.0 + u * (2.0 / 5.0 + u * (2.0 / 7.0))))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (a - b) / np.where(small, 1.0, np.log(zeta))
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def _primitives(q, phi, gamma):
    q = np.asarray(q, dtype=float)
    rho, rhou, _ = _split(q)
    u = rhou / rho[..., None]
    p = pressure(q, phi, gamma)
    return rho, u, p, 0.5 * rho / p


def ec_flux(q_m, phi_m, q_p, phi_p, k: int, gamma: float = 1.4) -> np.ndarray:
    """Entropy-conservative two-point flux in direction k (q+-dependent part).

    This is the first bracket of the fluctuation flux; the one-sided
    physical-flux bracket cancels identically in the scheme and is left
    to callers that need the full fluctuation.
    """
    rho_m, u_m, p_m, b_m = _primitives(q_m, phi_m, gamma)
    rho_p, u_p, p_p, b_p = _primitives(q_p, phi_p, gamma)
    rho_log = log_mean(rho_m, rho_p)
    b_log = log_mean(b_m, b_p)
    u_avg = 0.5 * (u_m + u_p)
    rho_avg = 0.5 * (rho_m + rho_p)
    b_avg = 0.5 * (b_m + b_p)
    p_star = rho_avg / (2.0 * b_avg)
    rho_hat = b_avg * rho_log / b_m
    e_star = (
        1.0 / (2.0 * (gamma - 1.0) * b_log)
        + 0.5 * (np.asarray(phi_m) + np.asarray(phi_p))
        + np.sum(u_avg * u_avg, axis=-1)
        - 0.25 * (np.sum(u_m * u_m, axis=-1) + np.sum(u_p * u_p, axis=-1))
    )
    jump_phi = np.asarray(phi_p) - np.asarray(phi_m)
    ru_star = rho_log * u_avg[..., k]
    flux = np.empty_like(np.asarray(q_m, dtype=float))
    flux[..., 0] = ru_star
    flux[..., 1:-1] = ru_star[..., None] * u_avg
    flux[..., 1 + k] += p_star + 0.5 * rho_hat * jump_phi
    flux[..., -1] = e_star * ru_star + u_avg[..., k] * p_star
    return flux


def physical_flux(q, phi, k: int, gamma: float = 1.4) -> np.ndarray:
    """One-sided physical flux h_k (conservative rows only)."""
    q = np.asarray(q, dtype=float)
    rho, u, p, _ = _primitives(q, phi, gamma)
    flux = np.empty_like(q)
    flux[..., 0] = rho * u[..., k]
    flux[..., 1:-1] = rho[..., None] * u * u[..., k : k + 1]
    flux[..., 1 + k] += p
    flux[..., -1] = u[..., k] * (q[..., -1] + p)
    return flux


def coriolis_source(q, omega) -> np.ndarray:
    """Coriolis source -2 omega x u in the momentum rows.

    ``omega`` is the rotation vector, padded with zeros for d < 3.
    """
    q = np.asarray(q, dtype=float)
    d = q.shape[-1] - 2
    u3 = np.zeros(q.shape[:-1] + (3,))
    u3[..., :d] = q[..., 1:-1] / q[..., :1]
    w3 = np.zeros_like(u3)
    omega = np.asarray(omega, dtype=float)
    w3[..., : omega.shape[-1]] = omega
    cross = np.cross(w3, u3)
    g = np.zeros_like(q)
    g[..., 1:-1] = -2.0 * cross[..., :d]
    return g


def matrix_dissipation(q_m, q_p, normal, phi_m, phi_p, gamma: float = 1.4) -> np.ndarray:
    """Dissipation operator applied to the entropy-variable jump, H_n [[beta]].

    Tangent-free closed form of the eigendecomposition-based operator;
    the caller applies the -1/2 factor.  ``normal`` must be unit length.
    """
    q_m = np.asarray(q_m, dtype=float)
    q_p = np.asarray(q_p, dtype=float)
    d = q_m.shape[-1] - 2
    n = np.asarray(normal, dtype=float)
    rho_m, u_m, p_m, b_m = _primitives(q_m, phi_m, gamma)
    rho_p, u_p, p_p, b_p = _primitives(q_p, phi_p, gamma)
    beta_m = entropy_variables(q_m, phi_m, gamma)
    beta_p = entropy_variables(q_p, phi_p, gamma)
    jb = beta_p - beta_m
    jb_rho = jb[..., 0]
    jb_mom = jb[..., 1:-1]
    jb_e = jb[..., -1]

    rho_log = log_mean(rho_m, rho_p)
    b_log = log_mean(b_m, b_p)
    rho_avg = 0.5 * (rho_m + rho_p)
    b_avg = 0.5 * (b_m + b_p)
    u_avg = 0.5 * (u_m + u_p)
    p_star = rho_avg / (2.0 * b_avg)
    c_star = np.sqrt(p_star / rho_log)
    u2_bar = 2.0 * np.sum(u_avg * u_avg, axis=-1) - 0.5 * (
        np.sum(u_m * u_m, axis=-1) + np.sum(u_p * u_p, axis=-1)
    )
    phi_avg = 0.5 * (np.asarray(phi_m) + np.asarray(phi_p))
    h_star = gamma / (2.0 * b_log * (gamma - 1.0)) + 0.5 * u2_bar + phi_avg
    u_n = np.sum(n * u_avg, axis=-1)

    ndotjb = np.sum(n * jb_mom, axis=-1)
    udotjb = np.sum(u_avg * jb_mom, axis=-1)
    w1 = (
        np.abs(u_n - c_star)
        * rho_log
        / (2.0 * gamma)
        * (jb_rho + udotjb - c_star * ndotjb + (h_star - c_star * u_n) * jb_e)
    )
    w2 = (
        np.abs(u_n)
        * (gamma - 1.0)
        * rho_log
        / gamma
        * (jb_rho + udotjb + (0.5 * u2_bar + phi_avg) * jb_e)
    )
    w3 = (
        np.abs(u_n + c_star)
        * rho_log
        / (2.0 * gamma)
        * (jb_rho + udotjb + c_star * ndotjb + (h_star + c_star * u_n) * jb_e)
    )

    # tangential projector T = I - n n^T applied to the momentum jump
    tang_mom = jb_mom - ndotjb[..., None] * n
    tang_u = u_avg - u_n[..., None] * n

    out = np.empty_like(q_m)
    out[..., 0] = w1 + w2 + w3
    out[..., 1:-1] = (
        w1[..., None] * (u_avg - c_star[..., None] * n)
        + w2[..., None] * u_avg
        + w3[..., None] * (u_avg + c_star[..., None] * n)
        + (np.abs(u_n) * p_star)[..., None]
        * (tang_mom + tang_u * jb_e[..., None])
    )
    out[..., -1] = (
        w1 * (h_star - c_star * u_n)
        + w2 * (0.5 * u2_bar + phi_avg)
        + w3 * (h_star + c_star * u_n)
        + np.abs(u_n)
        * p_star
        * (np.sum(tang_u * jb_mom, axis=-1) + np.sum(tang_u * tang_u, axis=-1) * jb_e)
    )
    return out


def es_surface_flux(q_m, phi_m, q_p, phi_p, normal, gamma: float = 1.4) -> np.ndarray:
    """Normal entropy-stable flux: EC normal flux minus 1/2 H_n [[beta]]."""
    n = np.asarray(normal, dtype=float)
    d = np.asarray(q_m).shape[-1] - 2
    flux = np.zeros_like(np.asarray(q_m, dtype=float))
    for k in range(d):
        flux += n[..., k : k + 1] * ec_flux(q_m, phi_m, q_p, phi_p, k, gamma)
    flux -= 0.5 * matrix_dissipation(q_m, q_p, n, phi_m, phi_p, gamma)
    return flux


def max_wave_speed(q, phi, normal=None, gamma: float = 1.4):
    """|u . n| + sound speed; without a normal, |u| + sound speed."""
    q = np.asarray(q, dtype=float)
    rho, u, p, _ = _primitives(q, phi, gamma)
    c = np.sqrt(gamma * p / rho)
    if normal is None:
        un = np.sqrt(np.sum(u * u, axis=-1))
    else:
        un = np.abs(np.sum(u * np.asarray(normal, dtype=float), axis=-1))
    return un + c
