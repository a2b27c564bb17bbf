"""Compare the numpy and numba volume/surface kernels.

Usage: python3 benchmarks/kernel_benchmark.py [--degree N] [--elements KX,KY]
"""

import argparse
import time

import numpy as np

from esdg.cases import get_case
from esdg.mesh import build_box_mesh
from esdg.operators import build_element_operators
from esdg.quadrature import NodalBasis, lgl_rule, tensor_product_rule
from esdg.semidiscretization import Semidiscretization


def build(backend, degree, elements):
    case = get_case("bubble")
    basis = NodalBasis(degree)
    rule = lgl_rule(degree + 1)
    ops = build_element_operators(basis, tensor_product_rule(rule, 2), rule, 2)
    mesh = build_box_mesh(
        ops, case.lower, case.upper, elements, periodic=case.periodic,
        warp=case.warp,
    )
    sd = Semidiscretization(ops, mesh, case.gas, flux="es", backend=backend)
    q0 = sd.project(
        case.initial(mesh.xv.reshape(-1, 2)).reshape(mesh.n_elements, ops.n_vol, 4)
    )
    return sd, q0


def time_rhs(sd, q0, repeats=20):
    sd.rhs(q0)  # warm up (jit compile)
    t0 = time.perf_counter()
    for _ in range(repeats):
        sd.rhs(q0)
    return (time.perf_counter() - t0) / repeats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--elements", default="20,20")
    ap.add_argument("--repeats", type=int, default=20)
    args = ap.parse_args()
    elements = tuple(int(k) for k in args.elements.split(","))

    times = {}
    for backend in ("numpy", "numba"):
        try:
            sd, q0 = build(backend, args.degree, elements)
        except ImportError:
            print(f"{backend:>6}: unavailable")
            continue
        times[backend] = time_rhs(sd, q0, args.repeats)
        n_dof = sd.mesh.n_elements * sd.ops.n_coeff * 4
        rate = n_dof / times[backend] / 1e6
        print(
            f"{backend:>6}: {times[backend] * 1e3:8.2f} ms/rhs "
            f"({rate:6.1f} MDOF/s)"
        )
    if len(times) == 2:
        print(f"speedup: {times['numpy'] / times['numba']:.1f}x")


if __name__ == "__main__":
    main()
