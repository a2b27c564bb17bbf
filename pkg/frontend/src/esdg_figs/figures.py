"""The four figure kinds rendered from solver CSV files."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import Table

__all__ = ["PlotSpec", "plot", "FIGURE_KINDS"]

FIGURE_KINDS = ("profile", "field", "timeseries", "convergence")


@dataclass
class PlotSpec:
    """What to draw and where to put it.

    ``columns`` selects series: for profiles the y-columns, for fields
    the single color column, for time series the diagnostics column.
    ``reference`` optionally names a second table plotted as a line
    behind profile markers.
    """

    kind: str
    table: Table
    out_path: str
    columns: tuple = ()
    reference: Table | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None
    xlim: tuple | None = None
    ylim: tuple | None = None
    guides: tuple = ()  # convergence guide-line orders

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}"
            )


def _warn_if_empty(tab: Table, what: str) -> bool:
    if tab.n_rows == 0:
        warnings.warn(f"no rows in input; rendering empty {what} figure")
        return True
    return False


def _profile(spec: PlotSpec, ax):
    cols = spec.columns or ("rho",)
    if _warn_if_empty(spec.table, "profile"):
        return
    x = spec.table["x1"]
    order = np.argsort(x)
    if spec.reference is not None and spec.reference.n_rows:
        xr = spec.reference["x1"]
        ro = np.argsort(xr)
        for c in cols:
            ax.plot(xr[ro], spec.reference[c][ro], "-", color="0.4", lw=1.0)
    for c in cols:
        ax.plot(x[order], spec.table[c][order], ".", ms=3, label=c)
    if len(cols) > 1:
        ax.legend(frameon=False)


def _field(spec: PlotSpec, ax):
    col = (spec.columns or ("theta_p",))[0]
    if _warn_if_empty(spec.table, "field"):
        return
    x, y, v = spec.table["x1"], spec.table["x2"], spec.table[col]
    tpc = ax.tricontourf(x, y, v, levels=30, cmap="RdBu_r")
    ax.figure.colorbar(tpc, ax=ax, label=col)
    ax.set_aspect("equal")


def _timeseries(spec: PlotSpec, ax):
    col = (spec.columns or ("S",))[0]
    if _warn_if_empty(spec.table, "time-series"):
        return 0.0
    t = spec.table["t"]
    v = spec.table[col]
    if col == "S":
        # relative entropy change since the initial time
        ref = v[0]
        scale = abs(ref) if ref != 0.0 else 1.0
        y = (v - ref) / scale
        ax.plot(t, y, "-")
        ax.set_ylabel(r"$\Delta S / |S_0|$")
        peak = float(np.abs(y).max())
        ax.set_title(f"max |dS/S0| = {peak:.3e}")
        return peak
    ax.plot(t, v, "-")
    ax.set_ylabel(col)
    return float(np.abs(v).max())


def _convergence(spec: PlotSpec, ax):
    if _warn_if_empty(spec.table, "convergence"):
        return
    h = spec.table["h"]
    err_cols = spec.columns or tuple(
        c for c in spec.table.columns if c.startswith("err_")
    )
    for c in err_cols:
        ax.loglog(h, spec.table[c], "o-", label=c.replace("err_", ""))
    for order in spec.guides:
        anchor = spec.table[err_cols[0]][0]
        ax.loglog(
            h,
            anchor * (h / h[0]) ** order,
            "--",
            color="0.5",
            lw=1.0,
            label=f"order {order}",
        )
    ax.legend(frameon=False)
    ax.set_xlabel("h")
    ax.set_ylabel("L2 error")
    ax.invert_xaxis()


def plot(spec: PlotSpec):
    """Render one figure; returns the plotted peak for time series."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    result = None
    if spec.kind == "profile":
        _profile(spec, ax)
    elif spec.kind == "field":
        _field(spec, ax)
    elif spec.kind == "timeseries":
        result = _timeseries(spec, ax)
    elif spec.kind == "convergence":
        _convergence(spec, ax)
    if spec.xlabel:
        ax.set_xlabel(spec.xlabel)
    if spec.ylabel:
        ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150)
    plt.close(fig)
    return result
