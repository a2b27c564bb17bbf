"""Low-storage Runge-Kutta time integration with optional entropy relaxation.

The relaxation variant rescales each update q0 + gamma*(q - q0) so that
the discrete total entropy changes exactly by the entropy-pairing
estimate accumulated over the stages; with the entropy-conservative
flux this pins S(t) to S(0) up to the nonlinear-solve tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


__all__ = ["LSRK54", "step", "relaxed_step", "compute_dt", "integrate"]


@dataclass(frozen=True)
class LSRK54:
    """Five-stage fourth-order low-storage scheme (2N registers)."""

    A: np.ndarray = field(
        default_factory=lambda: np.array(
            [
                0.0,
                -567301805773.0 / 1357537059087.0,
                -2404267990393.0 / 2016746695238.0,
                -3550918686646.0 / 2091501179385.0,
                -1275806237668.0 / 842570457699.0,
            ]
        )
    )
    B: np.ndarray = field(
        default_factory=lambda: np.array(
            [
                1432997174477.0 / 9575080441755.0,
                5161836677717.0 / 13612068292357.0,
                1720146321549.0 / 2090206949498.0,
                3134564353537.0 / 4481467310338.0,
                2277821191437.0 / 14882151754819.0,
            ]
        )
    )
    c: np.ndarray = field(
        default_factory=lambda: np.array(
            [
                0.0,
                1432997174477.0 / 9575080441755.0,
                2526269341429.0 / 6820363962896.0,
                2006345519317.0 / 3224310063776.0,
                2802321613138.0 / 2924317926251.0,
            ]
        )
    )

    @property
    def n_stages(self) -> int:
        return self.A.size

    def quadrature_weights(self) -> np.ndarray:
        """Weights b_i of the equivalent Butcher tableau.

        Unrolling the 2N update gives q1 - q0 = dt * sum_i b_i k_i with
        b_i = sum_{j >= i} B_j prod_{l=i+1}^{j} A_l.
        """
        s = self.n_stages
        b = np.zeros(s)
        for i in range(s):
            prod = 1.0
            for j in range(i, s):
                if j > i:
                    prod *= self.A[j]
                b[i] += self.B[j] * prod
        return b


def step(rhs, q, dt, scheme=LSRK54()):
    """One plain low-storage step; rhs maps coefficients to d(coeffs)/dt."""
    dq = np.zeros_like(q)
    q = q.copy()
    for a, bw in zip(scheme.A, scheme.B):
        dq = a * dq + dt * rhs(q)
        q += bw * dq
    return q


def relaxed_step(sd, q, dt, scheme=LSRK54()):
    """One relaxation step; returns (q_new, gamma * dt, gamma).

    The relaxation parameter gamma solves
    S(q0 + gamma dq) - S(q0) = gamma * dS_est with dS_est the stage
    estimate dt * sum_i b_i <beta(q_i), M k_i>; time advances by
    gamma * dt to keep fourth-order accuracy.
    """
    bq = scheme.quadrature_weights()
    q0 = q
    q = q.copy()
    dq = np.zeros_like(q)
    dS_est = 0.0
    for a, bw, bweight in zip(scheme.A, scheme.B, bq):
        wr = sd.rhs_weighted(q)
        dS_est += dt * bweight * sd.entropy_pairing(q, wr)
        k = sd.solve_mass(wr)
        dq = a * dq + dt * k
        q += bw * dq
    delta = q - q0
    S0 = sd.total_entropy(q0)

    def resid(g):
        return sd.total_entropy(q0 + g * delta) - S0 - g * dS_est

    g = 1.0
    f = resid(g)
    tol = 1e-15 * max(1.0, abs(S0))
    if abs(f) <= tol:
        return q, g * dt, g
    # safeguarded Newton in a bracket around gamma = 1
    lo, hi = 0.5, 1.5
    flo, fhi = resid(lo), resid(hi)
    if flo * fhi > 0.0:
        # residual is below the rounding noise of S on the whole bracket
        if abs(f) <= 64.0 * np.finfo(float).eps * max(1.0, abs(S0)):
            return q, g * dt, g
        raise RuntimeError("relaxation parameter not bracketed in [0.5, 1.5]")
    for _ in range(60):
        if abs(f) <= tol:
            break
        if f * flo < 0.0:
            hi = g
        else:
            lo, flo = g, f
        slope = sd.entropy_derivative(q0, delta, g) - dS_est
        g_new = g - f / slope if slope != 0.0 else 0.5 * (lo + hi)
        if not (lo < g_new < hi):
            g_new = 0.5 * (lo + hi)
        g, f = g_new, resid(g_new)
    return q0 + g * delta, g * dt, g


def compute_dt(sd, qhat, cfl: float) -> float:
    """CFL step from the smallest node spacing and the fastest wave."""
    from .euler import max_wave_speed

    qv = sd.evaluate(qhat)
    speed = float(np.max(max_wave_speed(qv, sd.phi_v, gamma=sd.gas.gamma)))
    return cfl * sd.mesh.min_node_spacing() / speed


def integrate(
    sd,
    q0,
    t_end,
    dt,
    relaxation: bool = False,
    scheme=LSRK54(),
    callback=None,
    t0: float = 0.0,
):
    """March to t_end with fixed dt (last step clipped); returns (q, t, n)."""
    q, t, n = q0.copy(), t0, 0
    if callback is not None:
        callback(t, q)
    while t < t_end - 1e-12 * max(1.0, t_end):
        dt_n = min(dt, t_end - t)
        if relaxation:
            q, dt_eff, _ = relaxed_step(sd, q, dt_n, scheme)
            t += dt_eff
        else:
            q = step(sd.rhs, q, dt_n, scheme)
            t += dt_n
        n += 1
        if callback is not None:
            callback(t, q)
    return q, t, n
