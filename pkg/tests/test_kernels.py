"""Backend selection and bit-identity between the compiled kernels and
the pure-python twin."""

import os
import subprocess
import sys

import numpy as np
import pytest

from rdafront import _kernels_py
from rdafront.kernels import BACKEND

try:
    from rdafront import _kernels
except ImportError:
    _kernels = None

needs_compiled = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


def _front_arrays(n: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 10.0, n)
    T = 1.0 / (1.0 + np.exp(4.0 * (x - 4.0))) + 0.01 * rng.standard_normal(n)
    u = 3.0 * T + 0.05 * rng.standard_normal(n)  # mixed-sign interface speeds
    return np.ascontiguousarray(T), np.ascontiguousarray(u)


def test_python_rhs_rejects_bad_shapes():
    T = np.zeros(1)
    with pytest.raises(ValueError):
        _kernels_py.rhs_into(T, T, T.copy(), T.copy(), 0.1, 1.0)
    with pytest.raises(ValueError):
        _kernels_py.rhs_into(np.zeros(5), np.zeros(4), np.zeros(5), np.zeros(5), 0.1, 1.0)


@needs_compiled
def test_compiled_rhs_rejects_bad_shapes():
    T = np.zeros(1)
    with pytest.raises(ValueError):
        _kernels.rhs_into(T, T, T.copy(), T.copy(), 0.1, 1.0)


@needs_compiled
def test_rhs_bit_identity():
    T, u = _front_arrays(4097)
    out = []
    for mod in (_kernels_py, _kernels):
        dT, du = np.empty_like(T), np.empty_like(u)
        mod.rhs_into(T, u, dT, du, 0.02, 125.0)
        out.append((dT, du))
    assert np.array_equal(out[0][0], out[1][0])
    assert np.array_equal(out[0][1], out[1][1])


@needs_compiled
def test_stage_bit_identity():
    T, u = _front_arrays(513, seed=3)
    k = 0.1 * u
    dt = 7e-5
    for py_fn, cy_fn, args in (
        (_kernels_py.sspstage1, _kernels.sspstage1, (T, k, dt)),
        (_kernels_py.sspstage2, _kernels.sspstage2, (T, u, k, dt)),
        (_kernels_py.sspstage3, _kernels.sspstage3, (T, u, k, dt)),
    ):
        a, b = np.empty_like(T), np.empty_like(T)
        py_fn(*args, a)
        cy_fn(*args, b)
        assert np.array_equal(a, b)


@needs_compiled
def test_multistep_bit_identity():
    # 25 full SSP steps stay bitwise equal between backends
    from rdafront.pde_sim import FieldState, Grid, cfl_dt, step

    g = Grid(0.0, 20.0, 400)
    results = []
    for mod in (_kernels_py, _kernels):
        import rdafront.pde_sim as sim

        orig = (sim.rhs_into, sim.sspstage1, sim.sspstage2, sim.sspstage3)
        sim.rhs_into = mod.rhs_into
        sim.sspstage1 = mod.sspstage1
        sim.sspstage2 = mod.sspstage2
        sim.sspstage3 = mod.sspstage3
        try:
            T, u = _front_arrays(400, seed=11)
            s = FieldState(np.clip(T, 0.0, 1.0), u, 0.0)
            for _ in range(25):
                s = step(s, g, 125.0, cfl_dt(s, g), strict=False)
            results.append((s.T.copy(), s.u.copy()))
        finally:
            (sim.rhs_into, sim.sspstage1, sim.sspstage2, sim.sspstage3) = orig
    assert np.array_equal(results[0][0], results[1][0])
    assert np.array_equal(results[0][1], results[1][1])


def test_env_var_forces_fallback():
    code = (
        "from rdafront.kernels import BACKEND; print(BACKEND)"
    )
    env = dict(os.environ, RDAFRONT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0
    assert out.stdout.strip() == "python"


def test_default_backend_prefers_compiled():
    if _kernels is not None:
        assert BACKEND == "cython"
    else:
        assert BACKEND == "python"
