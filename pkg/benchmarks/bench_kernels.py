"""Timing comparison of the compiled finite-volume kernels against the
pure-numpy fallback, on a front-like state at production resolution.

Run:  python3 benchmarks/bench_kernels.py [n_cells] [repeats]
"""

import sys
import time

import numpy as np

from rdafront import _kernels_py

try:
    from rdafront import _kernels
except ImportError:
    _kernels = None


def front_state(n: int, dx: float):
    x = (np.arange(n) + 0.5) * dx
    T = 1.0 / (1.0 + np.exp(np.clip((x - 0.3 * n * dx) * 2.0, -500.0, 500.0)))
    u = 5.0 * T
    return np.ascontiguousarray(T), np.ascontiguousarray(u)


def bench_rhs(mod, T, u, dx, rho, repeats):
    dT = np.empty_like(T)
    du = np.empty_like(u)
    mod.rhs_into(T, u, dT, du, dx, rho)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        mod.rhs_into(T, u, dT, du, dx, rho)
    return (time.perf_counter() - t0) / repeats, dT, du


def bench_stages(mod, T, u, dx, rho, repeats):
    k = np.empty_like(T)
    y1 = np.empty_like(T)
    y2 = np.empty_like(T)
    out = np.empty_like(T)
    mod.rhs_into(T, u, k, out, dx, rho)
    dt = 0.4 * dx * dx / 2.0
    t0 = time.perf_counter()
    for _ in range(repeats):
        mod.sspstage1(T, k, dt, y1)
        mod.sspstage2(T, y1, k, dt, y2)
        mod.sspstage3(T, y2, k, dt, out)
    return (time.perf_counter() - t0) / repeats


def main() -> int:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 15000
    repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 300
    dx, rho = 0.02, 125.0
    T, u = front_state(n, dx)

    py_rhs, py_dT, py_du = bench_rhs(_kernels_py, T, u, dx, rho, repeats)
    py_stage = bench_stages(_kernels_py, T, u, dx, rho, repeats)
    print(f"n_cells={n} repeats={repeats}")
    print(f"python  rhs_into  {py_rhs * 1e6:10.1f} us/call")
    print(f"python  3 stages  {py_stage * 1e6:10.1f} us/call")

    if _kernels is None:
        print("compiled kernels not built; fallback only")
        return 0

    cy_rhs, cy_dT, cy_du = bench_rhs(_kernels, T, u, dx, rho, repeats)
    cy_stage = bench_stages(_kernels, T, u, dx, rho, repeats)
    print(f"cython  rhs_into  {cy_rhs * 1e6:10.1f} us/call   ({py_rhs / cy_rhs:5.2f}x)")
    print(f"cython  3 stages  {cy_stage * 1e6:10.1f} us/call   ({py_stage / cy_stage:5.2f}x)")

    mismatch = max(
        float(np.max(np.abs(py_dT - cy_dT))), float(np.max(np.abs(py_du - cy_du)))
    )
    print(f"backend rhs mismatch: {mismatch:.1e} (must be exactly 0)")
    return 0 if mismatch == 0.0 else 1


if __name__ == "__main__":
    sys.exit(main())
