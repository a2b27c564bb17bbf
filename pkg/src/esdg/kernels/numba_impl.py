"""Numba Hadamard-sum kernel: scalar two-point fluxes over element batches."""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, inline="always")
def _log_mean(a, b):
    zeta = a / b
    f = (zeta - 1.0) / (zeta + 1.0)
    u = f * f
    if u < 1e-4:
        return (a + b) / (2.0 + u * (2.0 / 3.0 + u * (2.0 / 5.0 + u * (2.0 / 7.0))))
    return (a - b) / np.log(zeta)


@njit(cache=True, parallel=True)
def hadamard_sum_kernel(q, phi, G, pn, pm, qnm, qmn, gamma, acc):
    K, _, ncomp = q.shape
    d = ncomp - 2
    P = pn.size
    for e in prange(K):
        un = np.empty(2)
        um = np.empty(2)
        ua = np.empty(2)
        for p in range(P):
            n = pn[p]
            m = pm[p]
            rho_n = q[e, n, 0]
            rho_m = q[e, m, 0]
            u2n = 0.0
            u2m = 0.0
            for i in range(d):
                un[i] = q[e, n, 1 + i] / rho_n
                um[i] = q[e, m, 1 + i] / rho_m
                ua[i] = 0.5 * (un[i] + um[i])
                u2n += un[i] * un[i]
                u2m += um[i] * um[i]
            p_n = (gamma - 1.0) * (
                q[e, n, 1 + d] - rho_n * phi[e, n] - 0.5 * rho_n * u2n
            )
            p_m = (gamma - 1.0) * (
                q[e, m, 1 + d] - rho_m * phi[e, m] - 0.5 * rho_m * u2m
            )
            b_n = 0.5 * rho_n / p_n
            b_m = 0.5 * rho_m / p_m
            rho_log = _log_mean(rho_n, rho_m)
            b_log = _log_mean(b_n, b_m)
            b_avg = 0.5 * (b_n + b_m)
            p_star = 0.5 * (rho_n + rho_m) / (2.0 * b_avg)
            ua2 = 0.0
            for i in range(d):
                ua2 += ua[i] * ua[i]
            e_star = (
                1.0 / (2.0 * (gamma - 1.0) * b_log)
                + 0.5 * (phi[e, n] + phi[e, m])
                + ua2
                - 0.25 * (u2n + u2m)
            )
            jphi = phi[e, m] - phi[e, n]
            for j in range(d):
                s = 0.0
                for k in range(d):
                    s += G[e, j, k, n] * qnm[k, p] - qmn[k, p] * G[e, j, k, m]
                if s == 0.0:
                    continue
                ru = rho_log * ua[j]
                acc[e, n, 0] += s * ru
                acc[e, m, 0] -= s * ru
                for i in range(d):
                    fm = ru * ua[i]
                    if i == j:
                        fm += p_star
                    acc[e, n, 1 + i] += s * fm
                    acc[e, m, 1 + i] -= s * fm
                # direction-dependent geopotential jump term
                acc[e, n, 1 + j] += s * 0.5 * (b_avg * rho_log / b_n) * jphi
                acc[e, m, 1 + j] += s * 0.5 * (b_avg * rho_log / b_m) * jphi
                fe = e_star * ru + ua[j] * p_star
                acc[e, n, 1 + d] += s * fe
                acc[e, m, 1 + d] -= s * fe


def hadamard_sum(q, phi, G, prep, gamma):
    acc = np.zeros_like(q)
    hadamard_sum_kernel(
        np.ascontiguousarray(q),
        np.ascontiguousarray(phi),
        np.ascontiguousarray(G),
        prep["pn"],
        prep["pm"],
        np.ascontiguousarray(prep["qnm"]),
        np.ascontiguousarray(prep["qmn"]),
        gamma,
        acc,
    )
    return acc


@njit(cache=True, parallel=True)
def surface_flux_kernel(qf, phif, ext_e, ext_n, wall, nrm, dissipate, gamma, out):
    """Normal interface flux at every face node, mirror ghosts at walls."""
    K, nf, ncomp = qf.shape
    d = ncomp - 2
    for e in prange(K):
        um = np.empty(2)
        up = np.empty(2)
        ua = np.empty(2)
        nv = np.empty(2)
        jbm = np.empty(2)
        for i in range(nf):
            rho_m = qf[e, i, 0]
            phm = phif[e, i]
            for k in range(d):
                um[k] = qf[e, i, 1 + k] / rho_m
                nv[k] = nrm[e, i, k]
            ep = ext_e[e, i]
            ip = ext_n[e, i]
            if wall[e, i]:
                rho_p = rho_m
                rhoe_p = qf[e, i, 1 + d]
                php = phm
                un_m = 0.0
                for k in range(d):
                    un_m += um[k] * nv[k]
                for k in range(d):
                    up[k] = um[k] - 2.0 * un_m * nv[k]
            else:
                rho_p = qf[ep, ip, 0]
                rhoe_p = qf[ep, ip, 1 + d]
                php = phif[ep, ip]
                for k in range(d):
                    up[k] = qf[ep, ip, 1 + k] / rho_p
            rhoe_m = qf[e, i, 1 + d]
            u2m = 0.0
            u2p = 0.0
            for k in range(d):
                ua[k] = 0.5 * (um[k] + up[k])
                u2m += um[k] * um[k]
                u2p += up[k] * up[k]
            p_m = (gamma - 1.0) * (rhoe_m - rho_m * phm - 0.5 * rho_m * u2m)
            p_p = (gamma - 1.0) * (rhoe_p - rho_p * php - 0.5 * rho_p * u2p)
            b_m = 0.5 * rho_m / p_m
            b_p = 0.5 * rho_p / p_p
            rho_log = _log_mean(rho_m, rho_p)
            b_log = _log_mean(b_m, b_p)
            b_avg = 0.5 * (b_m + b_p)
            p_star = 0.5 * (rho_m + rho_p) / (2.0 * b_avg)
            ua2 = 0.0
            un_a = 0.0
            for k in range(d):
                ua2 += ua[k] * ua[k]
                un_a += ua[k] * nv[k]
            e_star = (
                1.0 / (2.0 * (gamma - 1.0) * b_log)
                + 0.5 * (phm + php)
                + ua2
                - 0.25 * (u2m + u2p)
            )
            jphi = php - phm
            ru = rho_log * un_a
            out[e, i, 0] = ru
            for k in range(d):
                out[e, i, 1 + k] = ru * ua[k] + nv[k] * (
                    p_star + 0.5 * (b_avg * rho_log / b_m) * jphi
                )
            out[e, i, 1 + d] = e_star * ru + un_a * p_star
            if not dissipate:
                continue

            # entropy-variable jump
            s_m = np.log(p_m) - gamma * np.log(rho_m)
            s_p = np.log(p_p) - gamma * np.log(rho_p)
            jb0 = (gamma - s_p) / (gamma - 1.0) - (u2p - 2.0 * php) * b_p
            jb0 -= (gamma - s_m) / (gamma - 1.0) - (u2m - 2.0 * phm) * b_m
            for k in range(d):
                jbm[k] = 2.0 * (b_p * up[k] - b_m * um[k])
            jbe = -2.0 * (b_p - b_m)

            c_star = np.sqrt(p_star / rho_log)
            u2_bar = 2.0 * ua2 - 0.5 * (u2m + u2p)
            phi_avg = 0.5 * (phm + php)
            h_star = gamma / (2.0 * b_log * (gamma - 1.0)) + 0.5 * u2_bar + phi_avg
            ndotjb = 0.0
            udotjb = 0.0
            for k in range(d):
                ndotjb += nv[k] * jbm[k]
                udotjb += ua[k] * jbm[k]
            w1 = (
                abs(un_a - c_star)
                * rho_log
                / (2.0 * gamma)
                * (jb0 + udotjb - c_star * ndotjb + (h_star - c_star * un_a) * jbe)
            )
            w2 = (
                abs(un_a)
                * (gamma - 1.0)
                * rho_log
                / gamma
                * (jb0 + udotjb + (0.5 * u2_bar + phi_avg) * jbe)
            )
            w3 = (
                abs(un_a + c_star)
                * rho_log
                / (2.0 * gamma)
                * (jb0 + udotjb + c_star * ndotjb + (h_star + c_star * un_a) * jbe)
            )
            out[e, i, 0] -= 0.5 * (w1 + w2 + w3)
            aup = abs(un_a) * p_star
            e_acc = 0.0
            for k in range(d):
                tm = jbm[k] - ndotjb * nv[k]
                tu = ua[k] - un_a * nv[k]
                out[e, i, 1 + k] -= 0.5 * (
                    w1 * (ua[k] - c_star * nv[k])
                    + w2 * ua[k]
                    + w3 * (ua[k] + c_star * nv[k])
                    + aup * (tm + tu * jbe)
                )
                e_acc += tu * jbm[k] + tu * tu * jbe
            out[e, i, 1 + d] -= 0.5 * (
                w1 * (h_star - c_star * un_a)
                + w2 * (0.5 * u2_bar + phi_avg)
                + w3 * (h_star + c_star * un_a)
                + aup * e_acc
            )


def surface_flux(qf, phif, ext_e, ext_n, wall, nrm, dissipate, gamma):
    out = np.empty_like(qf)
    surface_flux_kernel(
        np.ascontiguousarray(qf),
        np.ascontiguousarray(phif),
        ext_e,
        ext_n,
        wall,
        np.ascontiguousarray(nrm),
        dissipate,
        gamma,
        out,
    )
    return out
