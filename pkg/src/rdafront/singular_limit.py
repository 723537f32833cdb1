"""Closed-form objects of the reduced (eps = 0) phase plane: conserved
curves, the two heteroclinic graphs, the singular selected speed, and the
transversality derivative of the closed-form mismatch."""

from __future__ import annotations

import math

__all__ = [
    "cbrt",
    "curve_residual",
    "g_s",
    "g_u",
    "c_star_0",
    "phi0",
    "dphi0_dc",
    "K_ORIGIN_FACTOR",
    "K_REST_STATE",
]

# integration constants of the conserved quantity (W-c)^3/3 - T + T^2/2:
# the curve through the origin carries k = K_ORIGIN_FACTOR * c^3, the curve
# through (1, c) carries k = K_REST_STATE.
K_ORIGIN_FACTOR = -1.0 / 3.0
K_REST_STATE = -0.5


def cbrt(x: float) -> float:
    """Real cube root, odd in x."""
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def curve_residual(T: float, W: float, c: float, k: float) -> float:
    """Residual of the conserved-curve equation; zero iff (T, W) lies on the
    level-k curve of the reduced field."""
    wc = W - c
    return wc * wc * wc / 3.0 - T + T * T / 2.0 - k


def g_s(c: float, T: float) -> float:
    """W-graph over T of the reduced curve through the origin (the branch
    carrying the strong stable manifold)."""
    return c + cbrt(3.0 * T - 1.5 * T * T - c ** 3)


def g_u(c: float, T: float) -> float:
    """W-graph over T of the reduced curve through (1, c) (the branch
    carrying the unstable manifold).  Depends on c only through the additive
    c, so its c-derivative is exactly 1."""
    return c + cbrt(3.0 * T - 1.5 * T * T - 1.5)


def c_star_0() -> float:
    """The singular selected speed: the unique c > 0 merging the two graphs
    into one heteroclinic curve (cube root of 3/2)."""
    return 1.5 ** (1.0 / 3.0)


def phi0(c: float) -> float:
    """Closed-form mismatch of the two graphs at the section T = 1/2.

    Strictly decreasing in c; its unique positive root is c_star_0().
    """
    if c <= 0.0:
        raise ValueError("need c > 0")
    return cbrt(1.125 - c ** 3) - cbrt(-0.375)


def dphi0_dc(c: float, T: float) -> float:
    """c-derivative of the graph gap g_s(c,T) - g_u(c,T).

    Since dg_u/dc = 1 exactly, the whole derivative is the g_s term
    -c^2 / (3T - 3T^2/2 - c^3)^(2/3); it is strictly negative wherever
    defined, which is what makes the mismatch root simple.
    """
    if not (T > 0.0):
        raise ValueError("need T > 0")
    rad = 3.0 * T - 1.5 * T * T - c ** 3
    if abs(rad) < 1e-15:
        raise ZeroDivisionError(
            f"derivative singular: 3T - 3T^2/2 = c^3 at c={c}, T={T}"
        )
    r = cbrt(rad)
    return -c * c / (r * r)
