"""Shooting computations of the two invariant manifolds whose gap at the
section T = 1/2 defines the speed-selecting mismatch function."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynsys import (
    Params,
    Section,
    Trajectory,
    eval_desing_tw,
    front_box,
    integrate,
)
from .equilibria import eigen2, numerical_jacobian, origin_eigenvalues, w_minus
from .singular_limit import phi0

__all__ = ["ShootError", "ShootResult", "shoot_unstable", "shoot_strong_stable", "mismatch"]

_DELTA_RANGE = (1e-9, 1e-3)


class ShootError(RuntimeError):
    """A shot failed to reach the section (or could not be seeded)."""


@dataclass(frozen=True)
class ShootResult:
    section_W: float
    seed_offset: float
    orbit: Trajectory
    converged: bool

    @property
    def steps(self) -> int:
        return self.orbit.naccepted


def _check_delta(delta: float) -> None:
    lo, hi = _DELTA_RANGE
    if not (lo <= delta <= hi):
        raise ValueError(f"seed offset {delta:g} outside [{lo:g}, {hi:g}]")


def _run_shot(p, seed, span, threshold, direction, side):
    sec = Section(component=0, threshold=threshold, direction=direction)
    traj = integrate(
        lambda t, s: eval_desing_tw(s, p),
        seed,
        span,
        sections=[sec],
        box=front_box(p),
    )
    if traj.status != "event-stopped":
        raise ShootError(
            f"{side}-side shot did not reach the section T={threshold:g}: "
            f"status={traj.status} {traj.message}".rstrip()
        )
    return traj


def shoot_unstable(p: Params, delta: float = 1e-6, threshold: float = 0.5) -> ShootResult:
    """Shoot the unstable manifold of the near-coalescent saddle forward to
    the section T = threshold; the returned W is the unstable graph value
    there."""
    if p.eps <= 0.0:
        raise ValueError(
            "shooting from the saddle needs eps > 0; at eps = 0 the graph "
            "is the closed form singular_limit.g_u"
        )
    _check_delta(delta)
    wm = w_minus(p.c, p.eps)
    jac = numerical_jacobian(lambda s: eval_desing_tw(s, p), (1.0, wm))
    pairs = eigen2(jac)
    lam_u = max(v.real if isinstance(v, complex) else v for v in pairs.values)
    if not (lam_u > 1e-12):
        raise ShootError(
            f"unstable eigenvalue {lam_u:g} too small to seed at "
            f"(c={p.c:g}, eps={p.eps:g})"
        )
    idx = max(range(2), key=lambda i: _real(pairs.values[i]))
    v = pairs.vectors[idx]
    v = tuple(_real(x) for x in v)
    if v[0] > 0.0:  # orient into the strip: T decreasing off the saddle
        v = (-v[0], -v[1])
    seed = (1.0 + delta * v[0], wm + delta * v[1])
    horizon = 50.0 / lam_u
    orbit = _run_shot(p, seed, (0.0, horizon), threshold, -1, "unstable")
    state = orbit.final_state
    return ShootResult(state[1], delta, orbit, abs(state[0] - threshold) < 1e-10)


def shoot_strong_stable(p: Params, delta: float = 1e-6, threshold: float = 0.5) -> ShootResult:
    """Shoot the strong stable manifold of the origin backward to the
    section T = threshold; works at eps = 0 too since the strong direction
    stays hyperbolic there."""
    _check_delta(delta)
    mu_minus, mu_plus = origin_eigenvalues(p)
    if abs(_real(mu_minus) - _real(mu_plus)) < 1e-10 or isinstance(mu_minus, complex):
        raise ShootError(
            f"stable eigenvalues collide at (c={p.c:g}, eps={p.eps:g}); "
            "no strong direction to follow"
        )
    jac = numerical_jacobian(lambda s: eval_desing_tw(s, p), (0.0, 0.0))
    pairs = eigen2(jac)
    idx = min(range(2), key=lambda i: _real(pairs.values[i]))
    v = tuple(_real(x) for x in pairs.vectors[idx])
    if v[0] < 0.0:  # orient into the strip: T > 0
        v = (-v[0], -v[1])
    seed = (delta * v[0], delta * v[1])
    horizon = 50.0 / abs(_real(mu_minus))
    orbit = _run_shot(p, seed, (0.0, -horizon), threshold, +1, "strong-stable")
    state = orbit.final_state
    return ShootResult(state[1], delta, orbit, abs(state[0] - threshold) < 1e-10)


def _real(z):
    return z.real if isinstance(z, complex) else z


def mismatch(p: Params, delta: float = 1e-6) -> float:
    """Selected-speed mismatch at the section T = 1/2: strong-stable graph
    minus unstable graph.  Exactly the closed form at eps = 0."""
    if p.eps == 0.0:
        return phi0(p.c)
    try:
        hs = shoot_strong_stable(p, delta).section_W
    except ShootError as err:
        raise ShootError(f"strong-stable side failed: {err}") from err
    try:
        hu = shoot_unstable(p, delta).section_W
    except ShootError as err:
        raise ShootError(f"unstable side failed: {err}") from err
    return hs - hu
