"""Global diagnostics, error norms and CSV output."""

from __future__ import annotations

import csv

import numpy as np

from .euler import pressure

__all__ = [
    "run_diagnostics",
    "l2_error",
    "convergence_rates",
    "potential_temperature",
    "DiagnosticsWriter",
    "write_snapshot",
    "evaluate_at_points",
]


def run_diagnostics(sd, qhat, t: float) -> dict:
    """One row of the diagnostics time series."""
    qv = sd.evaluate(qhat)
    p = pressure(qv, sd.phi_v, sd.gas.gamma, check=False)
    ints = sd.integrals(qhat)
    return {
        "t": t,
        "S": sd.total_entropy(qhat),
        "mass": float(ints[0]),
        "energy": float(ints[-1]),
        "min_rho": float(qv[..., 0].min()),
        "min_p": float(p.min()),
    }


def l2_error(sd, qhat, reference, t: float = 0.0) -> np.ndarray:
    """Domain-normalized L2 error per field against reference(x, t)."""
    qv = sd.evaluate(qhat)
    qe = reference(sd.mesh.xv, t)
    measure = float(np.sum(sd.wJv))
    diff = (qv - qe) ** 2
    return np.sqrt(np.einsum("eq,eqc->c", sd.wJv, diff) / measure)


def convergence_rates(h, errors) -> np.ndarray:
    """rate_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1}); 0/0 -> inf."""
    h = np.asarray(h, dtype=float)
    e = np.asarray(errors, dtype=float)
    if np.any(np.diff(h) >= 0):
        raise ValueError("h must be strictly decreasing")
    dlh = np.log(h[:-1] / h[1:])
    if e.ndim > 1:
        dlh = dlh[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        rates = np.log(e[:-1] / e[1:]) / dlh
    return np.where(np.isnan(rates), np.inf, rates)


def potential_temperature(qv, phi, gas) -> np.ndarray:
    """theta = T (p0/p)^(R_d/c_p) with p0 = 1e5 Pa."""
    p = pressure(qv, phi, gas.gamma, check=False)
    T = p / (qv[..., 0] * gas.R_d)
    return T * (1e5 / p) ** (gas.R_d / gas.c_p)


class DiagnosticsWriter:
    """Appends diagnostics rows to a CSV file."""

    columns = ("t", "S", "mass", "energy", "min_rho", "min_p")

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(self.columns)

    def write(self, row: dict):
        self._writer.writerow([f"{row[c]:.17g}" for c in self.columns])
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def write_snapshot(path, sd, qhat, theta_background=None):
    """Field snapshot at the interpolation nodes, one row per node."""
    d = sd.mesh.dim
    x = sd.mesh.coords.reshape(-1, d)
    qn = np.einsum(
        "qm,emc->eqc",
        np.eye(qhat.shape[1]) if sd.ops.collocated else _coeff_to_nodes(sd),
        qhat,
    ).reshape(-1, d + 2)
    phi = np.asarray(sd.gas.geopotential(x))
    p = pressure(qn, phi, sd.gas.gamma, check=False)
    theta = potential_temperature(qn, phi, sd.gas)
    if theta_background is not None:
        theta = theta - np.asarray(theta_background(x))
    cols = ["x1"] + (["x2"] if d == 2 else [])
    cols += ["rho"] + [f"rhou{i+1}" for i in range(d)] + ["rhoe", "p", "theta_p"]
    data = np.column_stack([x, qn, p, theta])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in data:
            w.writerow([f"{v:.17g}" for v in row])


def _coeff_to_nodes(sd):
    # identity for the nodal LGL basis; included for symmetry with evaluate()
    return np.eye(sd.ops.n_coeff)


def evaluate_at_points(sd, qhat, points) -> np.ndarray:
    """Evaluate the solution at arbitrary physical points.

    Only valid for unwarped box meshes, where the element containing a
    point follows from index arithmetic on the structured grid.
    """
    from .quadrature import tensor_vandermonde

    mesh, ops = sd.mesh, sd.ops
    d = mesh.dim
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    allc = mesh.coords.reshape(-1, d)
    lower = allc.min(axis=0)
    upper = allc.max(axis=0)
    # recover the structured shape from element origins
    origins = mesh.coords[:, 0, :]
    n1 = int(np.sum(np.isclose(origins[:, -1], origins[0, -1])) if d == 2 else mesh.n_elements)
    shape = (n1, mesh.n_elements // n1) if d == 2 else (mesh.n_elements,)
    h = (upper - lower) / np.asarray(shape, dtype=float)
    idx = np.clip(((pts - lower) / h).astype(int), 0, np.asarray(shape) - 1)
    elems = idx[:, 0] if d == 1 else idx[:, 0] + shape[0] * idx[:, 1]
    ref = 2.0 * (pts - (lower + idx * h)) / h - 1.0
    out = np.empty((pts.shape[0], qhat.shape[-1]))
    for e in np.unique(elems):
        sel = elems == e
        V = tensor_vandermonde(ops.basis, ref[sel] if d == 2 else ref[sel, 0])
        out[sel] = V @ qhat[e]
    return out
