"""Pure-python (numpy) twin of the compiled right-hand-side kernel.

Expression grouping matches the compiled loop exactly so both backends
produce bit-identical derivatives; keep any edits mirrored there.
"""

from __future__ import annotations

import numpy as np


def rhs_into(T, u, dT, du, dx, rho):
    """Conservative first-order upwind advection, central diffusion on T,
    logistic reaction, zero-gradient boundaries.  Writes into dT/du."""
    n = T.shape[0]
    if n < 2:
        raise ValueError("need at least 2 cells")
    if u.shape[0] != n or dT.shape[0] != n or du.shape[0] != n:
        raise ValueError("field and output arrays must share one length")
    dx2 = dx * dx
    a = 0.5 * (u[:-1] + u[1:])
    up = a >= 0.0
    t_up = np.where(up, T[:-1], T[1:])
    u_up = np.where(up, u[:-1], u[1:])
    F = np.empty(n + 1)
    G = np.empty(n + 1)
    F[1:-1] = a * t_up
    G[1:-1] = 0.5 * u_up * u_up
    F[0] = u[0] * T[0]
    G[0] = 0.5 * u[0] * u[0]
    F[n] = u[n - 1] * T[n - 1]
    G[n] = 0.5 * u[n - 1] * u[n - 1]
    lap = np.empty(n)
    lap[1:-1] = (T[:-2] - 2.0 * T[1:-1] + T[2:]) / dx2
    lap[0] = (T[1] - T[0]) / dx2
    lap[n - 1] = (T[n - 2] - T[n - 1]) / dx2
    r = T * (1.0 - T)
    dT[:] = lap - np.diff(F) / dx + r
    du[:] = -np.diff(G) / dx + rho * r


def sspstage1(y, k, dt, out):
    """out = y + dt*k"""
    out[:] = y + dt * k


def sspstage2(y, y1, k, dt, out):
    """out = 0.75*y + 0.25*(y1 + dt*k)"""
    out[:] = 0.75 * y + 0.25 * (y1 + dt * k)


def sspstage3(y, y2, k, dt, out):
    """out = y/3 + (2/3)*(y2 + dt*k)"""
    out[:] = y / 3.0 + (2.0 / 3.0) * (y2 + dt * k)
