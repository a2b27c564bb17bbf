"""Command-line driver: run cases, convergence studies and verification."""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import diagnostics as diag
from .cases import CASES, get_case
from .euler import (
    AdmissibilityError,
    ec_flux,
    entropy_flux,
    entropy_variables,
    es_surface_flux,
    matrix_dissipation,
    physical_flux,
    pressure,
)
from .mesh import WALL, build_box_mesh, check_gcl, check_watertight
from .operators import build_element_operators
from .quadrature import NodalBasis, gauss_rule, lgl_rule, tensor_product_rule
from .semidiscretization import Semidiscretization
from .timestepping import compute_dt, integrate


def _parse_elements(text, dim):
    parts = [int(p) for p in str(text).replace("x", ",").split(",") if p]
    if len(parts) == 1:
        parts = parts * dim
    if len(parts) != dim:
        raise ValueError(f"need {dim} element counts, got {text!r}")
    return tuple(parts)


def load_config_file(path) -> dict:
    """key=value lines; '#' starts a comment; blank lines ignored."""
    out = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key=value, got {line!r}")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def build_run_config(argv_ns) -> dict:
    """Merge case defaults, config file and command-line overrides."""
    cfg = {}
    if getattr(argv_ns, "config", None):
        cfg.update(load_config_file(argv_ns.config))
    for key in (
        "case",
        "degree",
        "elements",
        "quadrature",
        "flux",
        "cfl",
        "t_end",
        "warp",
        "relaxation",
        "out",
        "output_every",
        "seed",
        "backend",
        "half_width",
        "delta_t",
    ):
        v = getattr(argv_ns, key, None)
        if v is not None:
            cfg[key] = v
    if "case" not in cfg:
        raise SystemExit("error: no case selected (use --case or a config file)")
    case = get_case(str(cfg["case"]))
    cfg.setdefault("degree", case.degree)
    cfg.setdefault("elements", ",".join(str(k) for k in case.elements))
    cfg.setdefault("quadrature", "lgl")
    cfg.setdefault("flux", case.flux)
    cfg.setdefault("cfl", case.cfl)
    cfg.setdefault("t_end", case.t_end)
    cfg.setdefault("warp", False)
    cfg.setdefault("relaxation", case.relaxation)
    cfg.setdefault("out", "out")
    cfg.setdefault("output_every", 0.0)
    cfg.setdefault("seed", 0)
    cfg.setdefault("backend", None)
    cfg["case"] = str(cfg["case"])
    cfg["degree"] = int(cfg["degree"])
    cfg["elements"] = _parse_elements(cfg["elements"], case.dim)
    cfg["quadrature"] = str(cfg["quadrature"]).lower()
    if cfg["quadrature"] not in ("lgl", "gauss"):
        raise SystemExit(f"error: unknown quadrature {cfg['quadrature']!r}")
    cfg["flux"] = str(cfg["flux"]).lower()
    if cfg["flux"] not in ("ec", "es"):
        raise SystemExit(f"error: unknown flux {cfg['flux']!r}")
    cfg["cfl"] = float(cfg["cfl"])
    cfg["t_end"] = float(cfg["t_end"])
    for key in ("warp", "relaxation"):
        v = cfg[key]
        cfg[key] = v if isinstance(v, bool) else _BOOL[str(v).lower()]
    cfg["output_every"] = float(cfg["output_every"])
    cfg["seed"] = int(cfg["seed"])
    return cfg


def build_discretization(cfg, elements=None):
    """Operators, mesh and semidiscretization for a run configuration."""
    options = {}
    for key in ("half_width", "delta_t"):
        if cfg.get(key) is not None:
            options[key] = float(cfg[key])
    case = get_case(cfg["case"], **options)
    N = cfg["degree"]
    basis = NodalBasis(N)
    rule = lgl_rule(N + 1) if cfg["quadrature"] == "lgl" else gauss_rule(N + 2)
    vol = tensor_product_rule(rule, case.dim)
    face = rule if case.dim == 2 else None
    ops = build_element_operators(basis, vol, face, case.dim)
    warp = case.warp if cfg["warp"] else None
    mesh = build_box_mesh(
        ops,
        case.lower,
        case.upper,
        elements or cfg["elements"],
        periodic=case.periodic,
        warp=warp,
    )
    sd = Semidiscretization(
        ops, mesh, case.gas, flux=cfg["flux"], omega=case.omega,
        backend=cfg.get("backend"),
    )
    q0 = sd.project(case.initial(mesh.xv.reshape(-1, case.dim)).reshape(
        mesh.n_elements, ops.n_vol, case.dim + 2))
    return case, ops, mesh, sd, q0


def cmd_run(args) -> int:
    cfg = build_run_config(args)
    case, ops, mesh, sd, q0 = build_discretization(cfg)
    os.makedirs(cfg["out"], exist_ok=True)
    dt = compute_dt(sd, q0, cfg["cfl"])
    start = diag.run_diagnostics(sd, q0, 0.0)
    wall0 = time.perf_counter()
    snap_next = [0.0]

    with diag.DiagnosticsWriter(os.path.join(cfg["out"], "diagnostics.csv")) as w:

        def callback(t, q):
            w.write(diag.run_diagnostics(sd, q, t))
            if cfg["output_every"] > 0.0 and t >= snap_next[0] - 1e-12:
                path = os.path.join(cfg["out"], f"snapshot_t{t:012.6f}.csv")
                diag.write_snapshot(path, sd, q, case.theta_background)
                snap_next[0] += cfg["output_every"]

        try:
            q, t, nsteps = integrate(
                sd, q0, cfg["t_end"], dt,
                relaxation=cfg["relaxation"], callback=callback,
            )
        except AdmissibilityError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1

    wall = time.perf_counter() - wall0
    final = diag.run_diagnostics(sd, q, t)
    diag.write_snapshot(
        os.path.join(cfg["out"], "snapshot_final.csv"), sd, q, case.theta_background
    )
    lines = [
        f"case = {cfg['case']}",
        f"degree = {cfg['degree']}",
        f"elements = {cfg['elements']}",
        f"quadrature = {cfg['quadrature']}",
        f"flux = {cfg['flux']}",
        f"relaxation = {cfg['relaxation']}",
        f"warp = {cfg['warp']}",
        f"steps = {nsteps}",
        f"t_final = {t:.17g}",
        f"wall_seconds = {wall:.3f}",
        f"entropy_drift_rel = {(final['S'] - start['S']) / abs(start['S']):.3e}"
        if start["S"] != 0.0
        else f"entropy_drift_abs = {final['S'] - start['S']:.3e}",
        f"mass_drift_rel = {(final['mass'] - start['mass']) / start['mass']:.3e}",
        f"energy_drift_rel = {(final['energy'] - start['energy']) / start['energy']:.3e}",
        f"min_rho = {final['min_rho']:.6g}",
        f"min_p = {final['min_p']:.6g}",
    ]
    with open(os.path.join(cfg["out"], "summary.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0


def _derived_fields(q, R_d, gamma, phi):
    """Temperature and vertical velocity from conservative variables."""
    p = pressure(q, phi, gamma, check=False)
    T = p / (q[..., 0] * R_d)
    w = q[..., -2] / q[..., 0]
    return T, w


def cmd_convergence(args) -> int:
    cfg = build_run_config(args)
    case = get_case(cfg["case"])
    levels = args.levels
    base = np.asarray(cfg["elements"])
    elem_list = [tuple(int(k) * 2**lvl for k in base) for lvl in range(levels)]
    runs = []
    for elems in elem_list:
        c, ops, mesh, sd, q0 = build_discretization(cfg, elements=elems)
        dt = compute_dt(sd, q0, cfg["cfl"])
        q, t, _ = integrate(sd, q0, cfg["t_end"], dt, relaxation=cfg["relaxation"])
        runs.append((elems, sd, q, t))
        print(f"  level {elems}: done (t = {t:.6g})", flush=True)

    d = case.dim
    hs = [(case.upper[0] - case.lower[0]) / e[0] for e, *_ in runs]
    if case.exact is not None:
        errs = np.array(
            [diag.l2_error(sd, q, case.exact, t) for _, sd, q, t in runs]
        )
        names = ["rho"] + [f"rhou{i+1}" for i in range(d)] + ["rhoe"]
    else:
        # self-convergence: one-level-finer reference, compared at the
        # coarse quadrature points (requires an unwarped nested mesh)
        if cfg["warp"]:
            raise SystemExit("error: self-convergence needs an unwarped mesh")
        ref_elems = tuple(np.asarray(elem_list[-1]) * 2)
        _, _, _, sd_ref, qr0 = build_discretization(cfg, elements=ref_elems)
        dt = compute_dt(sd_ref, qr0, cfg["cfl"])
        q_ref, t_ref, _ = integrate(
            sd_ref, qr0, cfg["t_end"], dt, relaxation=cfg["relaxation"]
        )
        print(f"  reference {ref_elems}: done (t = {t_ref:.6g})", flush=True)
        gamma, R_d = case.gas.gamma, case.gas.R_d
        errs = []
        for _, sd, q, t in runs:
            pts = sd.mesh.xv.reshape(-1, d)
            qc = sd.evaluate(q).reshape(-1, d + 2)
            qe = diag.evaluate_at_points(sd_ref, q_ref, pts)
            phi = np.asarray(case.gas.geopotential(pts))
            Tc, wc = _derived_fields(qc, R_d, gamma, phi)
            Te, we = _derived_fields(qe, R_d, gamma, phi)
            wJ = sd.wJv.reshape(-1)
            measure = wJ.sum()
            errs.append(
                [
                    np.sqrt(np.sum(wJ * (Tc - Te) ** 2) / measure),
                    np.sqrt(np.sum(wJ * (wc - we) ** 2) / measure),
                ]
            )
        errs = np.asarray(errs)
        names = ["T", "w"]

    rates = diag.convergence_rates(hs, errs)
    os.makedirs(cfg["out"], exist_ok=True)
    path = os.path.join(cfg["out"], "convergence.csv")
    with open(path, "w") as fh:
        fh.write("h," + ",".join(f"err_{n}" for n in names))
        fh.write("," + ",".join(f"rate_{n}" for n in names) + "\n")
        for i, h in enumerate(hs):
            row = [f"{h:.17g}"] + [f"{e:.17g}" for e in errs[i]]
            row += [f"{r:.4f}" for r in rates[i - 1]] if i > 0 else [""] * len(names)
            fh.write(",".join(row) + "\n")
    header = f"{'h':>12} " + " ".join(f"{('err_' + n):>12}" for n in names)
    print(header)
    for i, h in enumerate(hs):
        line = f"{h:12.5g} " + " ".join(f"{e:12.5e}" for e in errs[i])
        if i > 0:
            line += "   rates: " + " ".join(f"{r:6.3f}" for r in rates[i - 1])
        print(line)
    print(f"table written to {path}")
    return 0


def _verify_checks(cfg, rng):
    """Yield (name, residual, tolerance, ok) for the property suite."""
    case, ops, mesh, sd, q0 = build_discretization(cfg)
    d, gam = case.dim, case.gas.gamma

    for i in range(d):
        Q = ops.Q[i]
        expect = np.zeros_like(Q)
        expect[ops.n_vol :, ops.n_vol :] = np.diag(ops.Bf[i])
        r = np.abs(Q + Q.T - expect).max()
        yield (f"sbp identity Q_{i+1}", r, 1e-12, r < 1e-12)
        r = np.abs(Q @ np.ones(Q.shape[0])).max()
        yield (f"null vector Q_{i+1} 1", r, 1e-12, r < 1e-12)

    scale = max(np.abs(mesh.G).max(), 1.0)
    r = check_gcl(ops, mesh) / scale
    yield ("metric identities (gcl)", r, 1e-12, r < 1e-12)
    r = check_watertight(mesh)
    yield ("face matching", r, 1e-8, r < 1e-8)

    # shuffle relations on random admissible pairs
    n_pairs = 200
    def rand_states(n):
        rho = 0.2 + rng.random(n)
        u = rng.standard_normal((n, d))
        p = 0.2 + rng.random(n)
        phi = rng.random(n)
        rhoe = p / (gam - 1.0) + rho * phi + 0.5 * rho * np.sum(u * u, axis=-1)
        return np.concatenate(
            [rho[:, None], rho[:, None] * u, rhoe[:, None]], axis=1
        ), phi

    qa, pa = rand_states(n_pairs)
    qb, pb = rand_states(n_pairs)
    ba = entropy_variables(qa, pa, gam)
    bb = entropy_variables(qb, pb, gam)
    worst = 0.0
    for k in range(d):
        Dab = ec_flux(qa, pa, qb, pb, k, gam) - physical_flux(qa, pa, k, gam)
        Dba = ec_flux(qb, pb, qa, pa, k, gam) - physical_flux(qb, pb, k, gam)
        lhs = np.sum(bb * Dba, axis=1) - np.sum(ba * Dab, axis=1)
        rhs = entropy_flux(qa, pa, k, gam) - entropy_flux(qb, pb, k, gam)
        rel = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1.0)
        worst = max(worst, rel.max())
    yield ("volume flux shuffle", worst, 1e-11, worst < 1e-11)

    # surface shuffle: the normal fluctuation contraction must not exceed
    # the entropy-flux jump; the dissipated part reduces to
    # -1/2 [[beta]]^T H_n [[beta]] <= 0
    nrm = rng.standard_normal((n_pairs, d))
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    lhs = np.zeros(n_pairs)
    rhs = np.zeros(n_pairs)
    for k in range(d):
        Dab = ec_flux(qa, pa, qb, pb, k, gam) - physical_flux(qa, pa, k, gam)
        Dba = ec_flux(qb, pb, qa, pa, k, gam) - physical_flux(qb, pb, k, gam)
        lhs += nrm[:, k] * (np.sum(bb * Dba, axis=1) - np.sum(ba * Dab, axis=1))
        rhs += nrm[:, k] * (entropy_flux(qa, pa, k, gam) - entropy_flux(qb, pb, k, gam))
    jb = bb - ba
    lhs -= 0.5 * np.sum(jb * matrix_dissipation(qa, qb, nrm, pa, pb, gam), axis=1)
    excess = float((lhs - rhs).max())
    yield ("surface flux shuffle", excess, 1e-12, excess < 1e-12)

    jb = bb - ba
    hn = matrix_dissipation(qa, qb, nrm, pa, pb, gam)
    contraction = float(np.min(np.sum(jb * hn, axis=1)))
    yield ("dissipation psd", -min(contraction, 0.0), 1e-12, contraction > -1e-12)

    # free stream on the configured mesh with a gravity-free gas
    from .euler import GasParameters

    sd0 = Semidiscretization(ops, mesh, GasParameters(), flux=cfg["flux"])
    qc = np.zeros((mesh.n_elements, ops.n_coeff, d + 2))
    qc[..., 0] = 1.0
    if not np.any(mesh.exterior_elem == WALL):
        qc[..., 1] = 0.4  # walls reflect; uniform flow needs periodicity
    qc[..., -1] = 2.0
    r = float(np.abs(sd0.rhs(qc)).max())
    yield ("free-stream preservation", r, 1e-11, r < 1e-11)

    if case.name.startswith("isothermal"):
        rel = float(np.abs(sd.rhs(q0)).max()) / float(np.abs(q0).max())
        yield ("hydrostatic balance", rel, 1e-13, rel < 1e-13)


def cmd_verify(args) -> int:
    cfg = build_run_config(args)
    rng = np.random.default_rng(cfg["seed"])
    failures = 0
    for name, resid, tol, ok in _verify_checks(cfg, rng):
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: residual {resid:.3e} (tol {tol:.0e})")
        failures += 0 if ok else 1
    return 1 if failures else 0


def cmd_mesh_info(args) -> int:
    cfg = build_run_config(args)
    case, ops, mesh, sd, _ = build_discretization(cfg)
    print(f"case {case.name}: {mesh.n_elements} elements, dim {mesh.dim}")
    print(f"degree {cfg['degree']}, quadrature {cfg['quadrature']}, "
          f"volume nodes {ops.n_vol}, face nodes {ops.n_face}")
    print(f"J range [{mesh.Jv.min():.6g}, {mesh.Jv.max():.6g}]")
    print(f"min node spacing {mesh.min_node_spacing():.6g}")
    print(f"gcl residual {check_gcl(ops, mesh):.3e}")
    print(f"face mismatch {check_watertight(mesh):.3e}")
    if args.dump_operators:
        os.makedirs(args.dump_operators, exist_ok=True)
        mats = {"Mv": ops.Mv, "Pv": ops.Pv, "Vv": ops.Vv, "Vf": ops.Vf}
        for i in range(ops.dim):
            mats[f"Q{i+1}"] = ops.Q[i]
            mats[f"Bf{i+1}"] = np.diag(ops.Bf[i])
        for name, mat in mats.items():
            np.savetxt(
                os.path.join(args.dump_operators, f"{name}.csv"),
                mat,
                delimiter=",",
            )
        print(f"operator matrices written to {args.dump_operators}")
    return 0


def _add_common(p):
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--case", choices=sorted(CASES))
    p.add_argument("--degree", type=int)
    p.add_argument("--elements", help="per-dimension counts, e.g. 10,10")
    p.add_argument("--quadrature", choices=("lgl", "gauss"))
    p.add_argument("--flux", choices=("ec", "es"))
    p.add_argument("--cfl", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--warp", action="store_const", const=True, default=None)
    p.add_argument(
        "--relaxation", action="store_const", const=True, default=None
    )
    p.add_argument("--out")
    p.add_argument("--output-every", dest="output_every", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--backend", choices=("numpy", "numba"))
    p.add_argument(
        "--half-width",
        dest="half_width",
        type=float,
        help="perturbation half-width for the gravity-wave case (m)",
    )
    p.add_argument(
        "--delta-t",
        dest="delta_t",
        type=float,
        help="perturbation amplitude for the gravity-wave case (K)",
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="esdg", description="entropy-stable DG solver for Euler with gravity"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("run", cmd_run),
        ("convergence", cmd_convergence),
        ("verify", cmd_verify),
        ("mesh-info", cmd_mesh_info),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(fn=fn)
        if name == "convergence":
            p.add_argument("--levels", type=int, default=3)
        if name == "mesh-info":
            p.add_argument("--dump-operators", help="directory for matrix CSVs")
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
