"""Critical front speed: bracketed root finding on the shooting mismatch,
epsilon sweeps with convergence diagnostics, recovery of the unscaled speed,
and front-profile extraction with decay/monotonicity checks."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .dynsys import Params, Section, eval_desing_tw, eval_scaled_tw, front_box, integrate
from .equilibria import eigen2, numerical_jacobian, w_minus
from .manifolds import ShootError, mismatch
from .rootfind import BracketError, brent
from .singular_limit import c_star_0

__all__ = [
    "SpeedResult",
    "SweepSummary",
    "FrontProfile",
    "solve_speed",
    "sweep",
    "front_profile",
    "front_decay_reference",
    "ctilde_from",
]

_FTOL = 1e-9


def _re(z):
    return z.real if isinstance(z, complex) else z


@dataclass(frozen=True)
class SpeedResult:
    """Selected speed at one epsilon.  rho and ctilde_star are None at
    eps = 0 where the unscaled problem has no finite counterpart."""

    eps: float
    c_star: float
    rho: float | None
    ctilde_star: float | None
    residual: float
    bracket: tuple[float, float]
    iterations: int


@dataclass(frozen=True)
class SweepSummary:
    results: tuple[SpeedResult, ...]
    failures: tuple[tuple[float, str], ...]
    order: float | None
    extrapolated: float | None
    limit_reference: float


@dataclass(frozen=True)
class FrontProfile:
    samples: tuple[tuple[float, float, float], ...]  # (X, T, W)
    decay_rate: float
    monotone: bool


def solve_speed(
    eps: float,
    bracket: tuple[float, float] = (1.0, 1.8),
    tol: float = 1e-10,
) -> SpeedResult:
    """Root of the mismatch in c on the bracket.

    Raises BracketError when the mismatch does not change sign on the
    bracket and lets shooting failures propagate."""
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0.0 < lo < hi):
        raise ValueError(f"bad bracket [{lo:g}, {hi:g}]")
    if eps < 0.0:
        raise ValueError("eps must be >= 0")
    res = brent(lambda c: mismatch(Params(c=c, eps=eps)), lo, hi, xtol=tol, ftol=_FTOL)
    if not res.converged:
        raise RuntimeError(
            f"root refinement stalled at c={res.root:.12g} "
            f"(residual {res.fvalue:.3g} after {res.iterations} iterations)"
        )
    rho = ctilde = None
    if eps > 0.0:
        rho = eps**-3
        ctilde = res.root / eps
    return SpeedResult(
        eps=float(eps),
        c_star=res.root,
        rho=rho,
        ctilde_star=ctilde,
        residual=abs(res.fvalue),
        bracket=(lo, hi),
        iterations=res.iterations,
    )


def _sweep_entry(job):
    eps, lo, hi, tol = job
    try:
        return "ok", solve_speed(eps, (lo, hi), tol)
    except (BracketError, ShootError, ValueError, RuntimeError) as err:
        return "err", (eps, f"{type(err).__name__}: {err}")


def _fit_order(results: Sequence[SpeedResult], reference: float) -> float | None:
    pts = []
    for r in results:
        err = abs(r.c_star - reference)
        if err > 0.0:
            pts.append((math.log(r.eps), math.log(err)))
    if len(pts) < 2:
        return None
    xbar = sum(x for x, _ in pts) / len(pts)
    ybar = sum(y for _, y in pts) / len(pts)
    sxx = sum((x - xbar) ** 2 for x, _ in pts)
    if sxx == 0.0:
        return None
    sxy = sum((x - xbar) * (y - ybar) for x, y in pts)
    return sxy / sxx


def _richardson(results: Sequence[SpeedResult], order: float | None) -> float | None:
    if order is None or len(results) < 2:
        return None
    prev, last = results[-2], results[-1]
    ratio = prev.eps / last.eps
    denom = ratio**order - 1.0
    if not (denom > 1e-12):
        return None
    return last.c_star + (last.c_star - prev.c_star) / denom


def sweep(
    eps_list: Sequence[float],
    bracket: tuple[float, float] = (1.0, 1.8),
    tol: float = 1e-10,
    workers: int = 1,
) -> SweepSummary:
    """solve_speed over a descending epsilon grid plus a convergence summary.

    Per-entry failures are recorded and the sweep continues; the order fit
    and Richardson extrapolation use whichever entries succeeded, in input
    order."""
    eps_vals = [float(e) for e in eps_list]
    if not eps_vals:
        raise ValueError("empty epsilon list")
    if any(e <= 0.0 for e in eps_vals):
        raise ValueError("sweep epsilons must be positive")
    if any(b >= a for a, b in zip(eps_vals, eps_vals[1:])):
        raise ValueError("sweep epsilons must be sorted descending")
    jobs = [(e, float(bracket[0]), float(bracket[1]), float(tol)) for e in eps_vals]
    if workers > 1:
        # ordered map keeps the output independent of completion order
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_entry, jobs, chunksize=1))
    else:
        outcomes = [_sweep_entry(j) for j in jobs]
    results: list[SpeedResult] = []
    failures: list[tuple[float, str]] = []
    for tag, payload in outcomes:
        (results if tag == "ok" else failures).append(payload)
    reference = c_star_0()
    order = _fit_order(results, reference)
    return SweepSummary(
        results=tuple(results),
        failures=tuple(failures),
        order=order,
        extrapolated=_richardson(results, order),
        limit_reference=reference,
    )


def _unstable_seed(p: Params, delta: float) -> tuple[tuple[float, float], float]:
    wm = w_minus(p.c, p.eps)
    jac = numerical_jacobian(lambda s: eval_desing_tw(s, p), (1.0, wm))
    pairs = eigen2(jac)
    lam_u = max(_re(v) for v in pairs.values)
    if not lam_u > 1e-12:
        raise ShootError(
            f"unstable eigenvalue {lam_u:g} too small to seed at "
            f"(c={p.c:g}, eps={p.eps:g})"
        )
    idx = max(range(2), key=lambda i: _re(pairs.values[i]))
    v = tuple(_re(x) for x in pairs.vectors[idx])
    if v[0] > 0.0:  # into the strip: T decreasing off the rest state
        v = (-v[0], -v[1])
    return (1.0 + delta * v[0], wm + delta * v[1]), lam_u


def front_profile(
    eps: float,
    c: float,
    x_span: tuple[float, float],
    delta: float = 1e-6,
    tail_floor: float = 1e-9,
) -> FrontProfile:
    """Heteroclinic front sampled against the physical comoving coordinate.

    Integrates the desingularized flow from the unstable seed with the
    comoving coordinate carried as a third component (its rate is c - W,
    undoing the time rescaling), stops at X = x_span[1] or when T falls to
    tail_floor, and fits log T against X on the tail T < 1e-3."""
    p = Params(c=c, eps=eps)
    if p.eps <= 0.0:
        raise ValueError("front profile needs eps > 0")
    x0, x1 = float(x_span[0]), float(x_span[1])
    if not x1 > x0:
        raise ValueError(f"empty span [{x0:g}, {x1:g}]")
    seed2, lam_u = _unstable_seed(p, delta)
    seed = (seed2[0], seed2[1], x0)

    def field(t, s):
        ft, fw = eval_desing_tw((s[0], s[1]), p)
        return ft, fw, p.c - s[1]

    tb, wb = front_box(p)
    traj = integrate(
        field,
        seed,
        (0.0, 60.0 / lam_u + 20.0 * (x1 - x0) / p.c),
        sections=[
            Section(component=0, threshold=tail_floor, direction=-1),
            Section(component=2, threshold=x1, direction=+1),
        ],
        box=(tb, wb, (x0 - 1.0, x1 + 1.0)),
    )
    if traj.status != "event-stopped":
        raise ShootError(
            f"profile integration ended early: status={traj.status} "
            f"{traj.message}".rstrip()
        )
    samples = tuple((s[2], s[0], s[1]) for s in traj.states)
    monotone = all(b[1] < a[1] for a, b in zip(samples, samples[1:]))
    lo = max(10.0 * tail_floor, 1e-12)
    tail = [(x, t) for x, t, _ in samples if lo < t < 1e-3]
    if len(tail) < 5:
        raise ShootError(
            f"tail window ({lo:g}, 1e-3) holds only {len(tail)} samples; "
            "widen x_span or lower tail_floor"
        )
    xbar = sum(x for x, _ in tail) / len(tail)
    ybar = sum(math.log(t) for _, t in tail) / len(tail)
    sxx = sum((x - xbar) ** 2 for x, _ in tail)
    sxy = sum((x - xbar) * (math.log(t) - ybar) for x, t in tail)
    return FrontProfile(samples=samples, decay_rate=-sxy / sxx, monotone=monotone)


def front_decay_reference(p: Params) -> float:
    """Linear decay rate at the rest state ahead of the front: magnitude of
    the most negative eigenvalue of the comoving-frame field's numerical
    Jacobian at the origin."""
    jac = numerical_jacobian(lambda s: eval_scaled_tw(s, p), (0.0, 0.0))
    return abs(min(_re(v) for v in eigen2(jac).values))


def ctilde_from(speed: SpeedResult) -> tuple[float, float]:
    """Unscaled coupling strength and speed recovered from a scaled result."""
    if speed.eps <= 0.0:
        raise ValueError("unscaled recovery needs eps > 0")
    rho = speed.eps**-3
    return rho, speed.c_star / speed.eps
