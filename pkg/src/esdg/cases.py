"""Test-case definitions: domains, initial states and defaults."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .euler import GasParameters

__all__ = ["Case", "CASES", "get_case"]

G_ACCEL = 9.81
P0 = 1.0e5


@dataclass(frozen=True)
class Case:
    """A runnable problem setup with sensible defaults."""

    name: str
    dim: int
    lower: tuple
    upper: tuple
    elements: tuple
    periodic: tuple
    gas: GasParameters
    initial: Callable  # x (n, d) -> conservative states (n, d+2)
    t_end: float
    cfl: float
    degree: int = 4
    flux: str = "es"
    relaxation: bool = False
    warp: Callable | None = None
    omega: tuple | None = None
    exact: Callable | None = None  # (x, t) -> states
    theta_background: Callable | None = None
    description: str = ""


def _conservative(rho, u, p, phi, gamma):
    u = np.atleast_2d(u.T).T if u.ndim == 1 else u
    rhoe = p / (gamma - 1.0) + rho * phi + 0.5 * rho * np.sum(u * u, axis=-1)
    return np.concatenate([rho[:, None], rho[:, None] * u, rhoe[:, None]], axis=1)


# -- Sod shock tube in a gravitational field ---------------------------------


def case_sod_gravity() -> Case:
    gas = GasParameters(geopotential=lambda x: x[..., 0])

    def initial(x):
        x1 = x[:, 0]
        left = x1 < 0.5
        rho = np.where(left, 1.0, 0.125)
        p = np.where(left, 1.0, 0.1)
        return _conservative(rho, np.zeros_like(x), p, x1, gas.gamma)

    return Case(
        name="sod",
        dim=1,
        lower=(0.0,),
        upper=(1.0,),
        elements=(32,),
        periodic=(False,),
        gas=gas,
        initial=initial,
        t_end=0.2,
        cfl=0.2,
        flux="es",
        description="shock tube with linear geopotential, wall boundaries",
    )


# -- rising thermal bubble ----------------------------------------------------

_BUBBLE_L = 2000.0
_BUBBLE_H = 2000.0


def _bubble_warp(x):
    L, H = _BUBBLE_L, _BUBBLE_H
    x1, x2 = x[:, 0], x[:, 1]
    y1 = x1 + (L / 5) * np.sin(np.pi * (x1 + L / 2) / L) * np.sin(2 * np.pi * x2 / H)
    y2 = x2 - (H / 5) * np.sin(2 * np.pi * (x1 + L / 2) / L) * np.sin(np.pi * x2 / H)
    return np.stack([y1, y2], axis=1)


def case_rising_bubble() -> Case:
    gas = GasParameters(geopotential=lambda x: G_ACCEL * x[..., 1])
    theta0 = 300.0
    c_p, R_d, gamma = gas.c_p, gas.R_d, gas.gamma

    def theta_field(x):
        r = np.sqrt(x[:, 0] ** 2 + (x[:, 1] - 260.0) ** 2)
        return theta0 + np.where(r <= 250.0, 0.5, 0.0)

    def initial(x):
        # neutrally stratified base: constant theta0, hydrostatic Exner pressure
        exner = 1.0 - G_ACCEL * x[:, 1] / (c_p * theta0)
        p = P0 * exner ** (c_p / R_d)
        theta = theta_field(x)
        T = theta * (p / P0) ** (R_d / c_p)
        rho = p / (R_d * T)
        return _conservative(rho, np.zeros_like(x), p, G_ACCEL * x[:, 1], gamma)

    return Case(
        name="bubble",
        dim=2,
        lower=(-_BUBBLE_L / 2, 0.0),
        upper=(_BUBBLE_L / 2, _BUBBLE_H),
        elements=(10, 10),
        periodic=(True, False),
        gas=gas,
        initial=initial,
        t_end=1000.0,
        cfl=0.4,
        flux="ec",
        relaxation=True,
        warp=_bubble_warp,
        theta_background=lambda x: np.full(x.shape[0], theta0),
        description="warm bubble in a neutrally stratified atmosphere",
    )


# -- inertia-gravity wave channel ----------------------------------------------

_GW_L = 300.0e3
_GW_H = 10.0e3


def _gw_warp(x):
    L, H = _GW_L, _GW_H
    x1, x2 = x[:, 0], x[:, 1]
    y1 = x1 + (L / 20) * np.sin(np.pi * x1 / L) * np.sin(2 * np.pi * x2 / H)
    y2 = x2 - (H / 20) * np.sin(2 * np.pi * x1 / L) * np.sin(np.pi * x2 / H)
    return np.stack([y1, y2], axis=1)


def case_gravity_wave(delta_t: float = 1e-3, half_width: float = 5.0e3) -> Case:
    gas = GasParameters(geopotential=lambda x: G_ACCEL * x[..., 1])
    T0, u0 = 250.0, 20.0
    R_d, gamma = gas.R_d, gas.gamma
    x_c = _GW_L / 2

    # periodic image sum of the Lorentzian bump 1/(1 + ((x-x_c)/a)^2):
    # sum_n f(x - nL) = (pi a/L) sinh(2 pi a/L) / (cosh(2 pi a/L)
    # - cos(2 pi (x-x_c)/L)), normalized to unit peak.  A bare Lorentzian
    # has a derivative kink across the periodic seam which caps the L2
    # convergence rate once the profile is resolved.
    s = 2.0 * np.pi * half_width / _GW_L

    def bump(x1):
        f = np.sinh(s) / (np.cosh(s) - np.cos(2.0 * np.pi * (x1 - x_c) / _GW_L))
        return f * (np.cosh(s) - 1.0) / np.sinh(s)

    def initial(x):
        p = P0 * np.exp(-G_ACCEL * x[:, 1] / (R_d * T0))
        dT = delta_t * np.sin(np.pi * x[:, 1] / _GW_H) * bump(x[:, 0])
        rho = p / (R_d * (T0 + dT))
        u = np.zeros_like(x)
        u[:, 0] = u0
        return _conservative(rho, u, p, G_ACCEL * x[:, 1], gamma)

    return Case(
        name="gravity-wave",
        dim=2,
        lower=(0.0, 0.0),
        upper=(_GW_L, _GW_H),
        elements=(25, 3),
        periodic=(True, False),
        gas=gas,
        initial=initial,
        t_end=300.0,
        cfl=0.4,
        degree=3,
        flux="es",
        warp=_gw_warp,
        theta_background=None,
        description="small-amplitude wave on an isothermal background",
    )


# -- isothermal hydrostatic balance -------------------------------------------


def _isothermal_case(dim: int) -> Case:
    T0 = 250.0
    gas = GasParameters(geopotential=lambda x: G_ACCEL * x[..., dim - 1])
    R_d, gamma = gas.R_d, gas.gamma
    H = 10.0e3

    def initial(x):
        r = x[:, dim - 1]
        p = P0 * np.exp(-G_ACCEL * r / (R_d * T0))
        rho = p / (R_d * T0)
        return _conservative(rho, np.zeros_like(x), p, G_ACCEL * r, gamma)

    def exact(x, t):
        return initial(x.reshape(-1, dim)).reshape(x.shape[:-1] + (dim + 2,))

    if dim == 1:
        lower, upper, elements, periodic = (0.0,), (H,), (8,), (False,)
    else:
        lower, upper = (0.0, 0.0), (H, H)
        elements, periodic = (4, 4), (True, False)
    return Case(
        name=f"isothermal-{dim}d",
        dim=dim,
        lower=lower,
        upper=upper,
        elements=elements,
        periodic=periodic,
        gas=gas,
        initial=initial,
        t_end=100.0,
        cfl=0.4,
        flux="es",
        exact=exact,
        description="exponential hydrostatic column; should stay at rest",
    )


def case_isothermal_1d() -> Case:
    return _isothermal_case(1)


def case_isothermal_2d() -> Case:
    return _isothermal_case(2)


# -- smooth manufactured advection (exact solution available) -----------------


def case_density_wave(dim: int = 1) -> Case:
    gas = GasParameters()

    def exact(x, t):
        x = np.atleast_2d(x) if x.ndim == 1 else x
        arg = np.sum(x, axis=-1) - dim * t
        rho = 2.0 + 0.5 * np.sin(2 * np.pi * arg)
        q = np.zeros(x.shape[:-1] + (dim + 2,))
        q[..., 0] = rho
        for i in range(dim):
            q[..., 1 + i] = rho
        q[..., -1] = 1.0 / (gas.gamma - 1.0) + 0.5 * dim * rho
        return q

    return Case(
        name=f"density-wave-{dim}d",
        dim=dim,
        lower=(0.0,) * dim,
        upper=(1.0,) * dim,
        elements=(8,) * dim,
        periodic=(True,) * dim,
        gas=gas,
        initial=lambda x: exact(x, 0.0),
        t_end=0.3,
        cfl=0.3,
        flux="es",
        exact=exact,
        description="translating density wave with unit velocity and pressure",
    )


CASES = {
    "sod": case_sod_gravity,
    "bubble": case_rising_bubble,
    "gravity-wave": case_gravity_wave,
    "isothermal-1d": case_isothermal_1d,
    "isothermal-2d": case_isothermal_2d,
    "density-wave-1d": lambda: case_density_wave(1),
    "density-wave-2d": lambda: case_density_wave(2),
}


def get_case(name: str, **options) -> Case:
    try:
        factory = CASES[name]
    except KeyError:
        raise KeyError(
            f"unknown case {name!r}; available: {', '.join(sorted(CASES))}"
        ) from None
    return factory(**options)
