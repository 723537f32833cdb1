# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled flux/reaction kernel for the method-of-lines right-hand side.

Arithmetic is ordered identically to the pure-python twin so the two
backends agree bit for bit; keep any edits mirrored there.
"""


def rhs_into(double[::1] T, double[::1] u, double[::1] dT, double[::1] du,
             double dx, double rho):
    """Conservative first-order upwind advection, central diffusion on T,
    logistic reaction, zero-gradient boundaries.  Writes into dT/du."""
    cdef Py_ssize_t n = T.shape[0]
    cdef Py_ssize_t i
    cdef double dx2 = dx * dx
    cdef double a, fl, gl, fr, gr, lap, r
    if n < 2:
        raise ValueError("need at least 2 cells")
    if u.shape[0] != n or dT.shape[0] != n or du.shape[0] != n:
        raise ValueError("field and output arrays must share one length")
    fl = u[0] * T[0]
    gl = 0.5 * u[0] * u[0]
    for i in range(n):
        if i == n - 1:
            fr = u[n - 1] * T[n - 1]
            gr = 0.5 * u[n - 1] * u[n - 1]
        else:
            a = 0.5 * (u[i] + u[i + 1])
            if a >= 0.0:
                fr = a * T[i]
                gr = 0.5 * u[i] * u[i]
            else:
                fr = a * T[i + 1]
                gr = 0.5 * u[i + 1] * u[i + 1]
        if i == 0:
            lap = (T[1] - T[0]) / dx2
        elif i == n - 1:
            lap = (T[n - 2] - T[n - 1]) / dx2
        else:
            lap = (T[i - 1] - 2.0 * T[i] + T[i + 1]) / dx2
        r = T[i] * (1.0 - T[i])
        dT[i] = lap - (fr - fl) / dx + r
        du[i] = -(gr - gl) / dx + rho * r
        fl = fr
        gl = gr


def sspstage1(double[::1] y, double[::1] k, double dt, double[::1] out):
    """out = y + dt*k"""
    cdef Py_ssize_t i, n = y.shape[0]
    for i in range(n):
        out[i] = y[i] + dt * k[i]


def sspstage2(double[::1] y, double[::1] y1, double[::1] k, double dt,
              double[::1] out):
    """out = 0.75*y + 0.25*(y1 + dt*k)"""
    cdef Py_ssize_t i, n = y.shape[0]
    for i in range(n):
        out[i] = 0.75 * y[i] + 0.25 * (y1[i] + dt * k[i])


def sspstage3(double[::1] y, double[::1] y2, double[::1] k, double dt,
              double[::1] out):
    """out = y/3 + (2/3)*(y2 + dt*k)"""
    cdef Py_ssize_t i, n = y.shape[0]
    for i in range(n):
        out[i] = y[i] / 3.0 + (2.0 / 3.0) * (y2[i] + dt * k[i])
