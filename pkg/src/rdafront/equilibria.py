"""Equilibrium locations, Jacobians, eigenpairs, and stability classes for
the desingularized traveling-wave field."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .dynsys import Params, eval_desing_tw

__all__ = [
    "Equilibrium",
    "EigenPairs",
    "w_minus",
    "w_plus",
    "h_residual",
    "numerical_jacobian",
    "eigen2",
    "equilibria_desing",
    "origin_eigenvalues",
]

# classification threshold: eigenvalue real parts below this are treated as 0
_HYP_TOL = 1e-8


def w_minus(c: float, eps: float) -> float:
    """Velocity component of the near-coalescent rest point.

    Evaluated in a cancellation-free form so that w_minus -> c smoothly as
    eps -> 0; always w_minus < c for eps > 0.
    """
    if not (c > 0.0 and eps >= 0.0):
        raise ValueError("need c > 0 and eps >= 0")
    e2 = eps * eps
    return c - e2 * c * c / (1.0 + math.sqrt(1.0 + e2 * e2 * c * c))


def w_plus(c: float, eps: float) -> float:
    """Velocity component of the far rest point; diverges as eps -> 0."""
    if eps <= 0.0:
        raise ValueError("w_plus is undefined at eps = 0 (branch diverges)")
    e2 = eps * eps
    return c + (1.0 + math.sqrt(1.0 + e2 * e2 * c * c)) / e2


def h_residual(w: float, c: float, eps: float) -> float:
    """Residual of the rest-point condition h(w) = w - c + eps^2 w(2c-w)/2."""
    return w - c + 0.5 * eps * eps * w * (2.0 * c - w)


def numerical_jacobian(f: Callable, point: Sequence[float], step: float = 1e-6):
    """Central-difference Jacobian of ``f(state) -> derivative-tuple``."""
    point = tuple(float(v) for v in point)
    n = len(point)
    cols = []
    for j in range(n):
        plus = list(point)
        minus = list(point)
        plus[j] += step
        minus[j] -= step
        fp = f(tuple(plus))
        fm = f(tuple(minus))
        cols.append([(a - b) / (2.0 * step) for a, b in zip(fp, fm)])
    return [[cols[j][i] for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class EigenPairs:
    values: tuple          # two eigenvalues, ascending by (real, imag)
    vectors: tuple         # unit eigenvectors (complex entries if needed)
    complex_pair: bool
    nilpotent: bool


def _unit(v):
    n = math.sqrt(sum(abs(x) ** 2 for x in v))
    if n == 0.0:
        return (1.0, 0.0)
    return tuple(x / n for x in v)


def _null_vector(a, b, c, d, lam):
    # a row of (A - lam I) with a nonzero entry yields the eigenvector
    r1 = (a - lam, b)
    r2 = (c, d - lam)
    if max(abs(r1[0]), abs(r1[1])) >= max(abs(r2[0]), abs(r2[1])):
        row = r1
    else:
        row = r2
    if row[0] == 0 and row[1] == 0:
        return (1.0, 0.0)
    return _unit((-row[1], row[0]))


def eigen2(matrix) -> EigenPairs:
    """Eigenpairs of a real 2x2 matrix by the quadratic formula."""
    (a, b), (c, d) = matrix
    tr = a + d
    det = a * d - b * c
    disc = tr * tr - 4.0 * det
    scale = 1.0 + max(abs(a), abs(b), abs(c), abs(d))
    if disc >= 0.0:
        s = math.sqrt(disc)
        lam1, lam2 = 0.5 * (tr - s), 0.5 * (tr + s)
        vecs = (_null_vector(a, b, c, d, lam1), _null_vector(a, b, c, d, lam2))
        nil = max(abs(lam1), abs(lam2)) < 1e-12 * scale and scale > 1.0
        return EigenPairs((lam1, lam2), vecs, False, nil)
    s = math.sqrt(-disc)
    lam1 = complex(0.5 * tr, -0.5 * s)
    lam2 = complex(0.5 * tr, 0.5 * s)
    vecs = (_null_vector(a, b, c, d, lam1), _null_vector(a, b, c, d, lam2))
    return EigenPairs((lam1, lam2), vecs, True, False)


_KINDS = ("saddle", "stable-node", "unstable-node", "center", "nonhyperbolic")


def _classify(pairs: EigenPairs) -> str:
    re = [v.real if isinstance(v, complex) else v for v in pairs.values]
    if pairs.complex_pair:
        if max(abs(r) for r in re) < _HYP_TOL:
            return "center"
        return "stable-node" if re[0] < 0 else "unstable-node"
    if min(abs(r) for r in re) < _HYP_TOL:
        return "nonhyperbolic"
    if re[0] * re[1] < 0.0:
        return "saddle"
    return "stable-node" if re[0] < 0 else "unstable-node"


@dataclass(frozen=True)
class Equilibrium:
    location: tuple
    jacobian: tuple
    eigenpairs: EigenPairs
    kind: str


def _equilibrium_at(point, p: Params) -> Equilibrium:
    jac = numerical_jacobian(lambda s: eval_desing_tw(s, p), point)
    pairs = eigen2(jac)
    return Equilibrium(
        location=tuple(point),
        jacobian=tuple(tuple(row) for row in jac),
        eigenpairs=pairs,
        kind=_classify(pairs),
    )


def equilibria_desing(p: Params) -> list:
    """All isolated rest points of the desingularized field inside the box
    T in [-0.1, 1.1], W in [-1, c+1], classified from the numerical Jacobian.

    At eps = 0 the T = 0 axis degenerates to a line of rest points; only the
    named points (0,0) and (1,c) are listed there.
    """
    c, eps = p.c, p.eps
    points = [(0.0, 0.0), (1.0, c)]
    if eps > 0.0:
        points.append((1.0, w_minus(c, eps)))
        wp = w_plus(c, eps)
        if wp <= c + 1.0:
            points.append((1.0, wp))
        # rest points created on T = 0 by the desingularizing factor
        points.append((0.0, c))
        if 2.0 * c <= c + 1.0:
            points.append((0.0, 2.0 * c))
    points = sorted(set(points))
    return [_equilibrium_at(q, p) for q in points]


def origin_eigenvalues(p: Params) -> tuple:
    """Eigenvalues of the desingularized field at the origin, ascending.

    For 0 < eps < c/2 both are real and negative; the smaller one is the
    strong-stable rate used to seed shooting.
    """
    eq = _equilibrium_at((0.0, 0.0), p)
    v = eq.eigenpairs.values
    key = lambda z: (z.real, z.imag) if isinstance(z, complex) else (z, 0.0)
    lo, hi = sorted(v, key=key)
    return (lo, hi)
