"""Pure-numpy Hadamard-sum kernel, vectorized over structural pairs."""

from __future__ import annotations

import numpy as np

from ..euler import ec_flux


def prepare(ops):
    """Per-pair operator entries and scatter matrices for one operator set."""
    pn, pm = ops.pairs_n, ops.pairs_m
    d = ops.dim
    qnm = np.stack([ops.Q[k][pn, pm] for k in range(d)])
    qmn = np.stack([ops.Q[k][pm, pn] for k in range(d)])
    n = ops.n_vol + ops.n_face
    P = pn.size
    scat_n = np.zeros((n, P))
    scat_m = np.zeros((n, P))
    scat_n[pn, np.arange(P)] = 1.0
    scat_m[pm, np.arange(P)] = 1.0
    return {"pn": pn, "pm": pm, "qnm": qnm, "qmn": qmn,
            "scat_n": scat_n, "scat_m": scat_m}


def hadamard_sum(q, phi, G, prep, gamma):
    """acc[e, n] = sum_m S_j[n, m] f_j(q_n, q_m) over structural pairs.

    S_j[n, m] = sum_k (G[j,k,n] Q_k[n,m] - Q_k[m,n] G[j,k,m]) is
    antisymmetric, so each pair contributes to both of its rows.
    """
    pn, pm = prep["pn"], prep["pm"]
    qnm, qmn = prep["qnm"], prep["qmn"]
    d = G.shape[1]
    qn = q[:, pn, :]
    qm = q[:, pm, :]
    phin = phi[:, pn]
    phim = phi[:, pm]
    # S[e, j, p]
    S = np.einsum("ejkp,kp->ejp", G[:, :, :, pn], qnm) - np.einsum(
        "kp,ejkp->ejp", qmn, G[:, :, :, pm]
    )
    contrib_n = np.zeros_like(qn)
    contrib_m = np.zeros_like(qm)
    for j in range(d):
        contrib_n += S[:, j, :, None] * ec_flux(qn, phin, qm, phim, j, gamma)
        contrib_m -= S[:, j, :, None] * ec_flux(qm, phim, qn, phin, j, gamma)
    return np.einsum("np,epc->enc", prep["scat_n"], contrib_n) + np.einsum(
        "np,epc->enc", prep["scat_m"], contrib_m
    )
