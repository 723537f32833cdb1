"""Bracketed scalar root finding (Brent's method).

Hand-rolled rather than delegated so the solver can report iteration counts,
honor a residual tolerance alongside the abscissa tolerance, and stay
dependency-free on the hot path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = ["BracketError", "BrentResult", "brent"]

_EPS = math.ulp(1.0)


class BracketError(ValueError):
    """The function does not change sign on the given bracket."""


@dataclass(frozen=True)
class BrentResult:
    root: float
    fvalue: float
    iterations: int
    converged: bool


def brent(
    f: Callable[[float], float],
    a: float,
    b: float,
    xtol: float = 1e-10,
    ftol: float = 1e-9,
    max_iter: int = 100,
) -> BrentResult:
    """Root of f on [a, b] by inverse-quadratic/secant steps guarded by
    bisection.

    Refines until the bracket collapses below ``xtol`` (or an exact zero is
    hit); ``ftol`` only classifies the result, it never stops refinement
    early.  On natural exit the returned root is within half the final
    bracket of the true zero, so the abscissa error is bounded by
    2*ulp(root) + xtol/2."""
    if xtol <= 0.0 or ftol <= 0.0:
        raise ValueError("tolerances must be positive")
    fa = f(a)
    if fa == 0.0:
        return BrentResult(a, fa, 0, True)
    fb = f(b)
    if fb == 0.0:
        return BrentResult(b, fb, 0, True)
    if (fa > 0.0) == (fb > 0.0):
        raise BracketError(
            f"no sign change on [{a:g}, {b:g}]: f(a)={fa:g}, f(b)={fb:g}"
        )
    c, fc = a, fa
    d = e = b - a
    for it in range(1, max_iter + 1):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * xtol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return BrentResult(b, fb, it, True)
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                # secant
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                # inverse quadratic
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, xm)
        fb = f(b)
    return BrentResult(b, fb, max_iter, abs(fb) <= ftol)
