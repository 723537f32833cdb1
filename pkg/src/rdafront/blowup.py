"""Quasi-homogeneous blow-up of the degenerate rest-state corner: the two
working charts, transitions between them, the Hamiltonian structure of the
rescaling chart, and a numerical check that the corner passage deflects
entering orbits by O(eps)."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .dynsys import Section, eval_chart_keps, eval_chart_kw, integrate
from .equilibria import eigen2, numerical_jacobian

__all__ = [
    "ChartPoint",
    "BlowdownPoint",
    "ChartOverlapError",
    "TransitionEntry",
    "TransitionReport",
    "blowdown",
    "keps_to_kw",
    "kw_to_keps",
    "hamiltonian",
    "unstable_graph_keps",
    "keps_saddle_w1",
    "kw_fixed_points",
    "phi_kappa",
    "verify_transition",
]

_CHARTS = ("K_eps", "K_W")
_Q = math.sqrt(2.0 / 3.0)  # |T2| at the edge-chart attractor


class ChartOverlapError(ValueError):
    """The point lies outside the overlap where the chart transition holds."""


def _re(z):
    return z.real if isinstance(z, complex) else z


@dataclass(frozen=True)
class ChartPoint:
    """A point in one blow-up chart.

    coords is (T1, W1, r1) in chart K_eps and (r2, eps2, T2) in chart K_W.
    The radial coordinate must be nonnegative; sector sign conventions
    (W1 >= 0, T1 <= 0 and eps2 >= 0, T2 <= 0) are the working region but are
    not enforced pointwise.
    """

    chart: str
    coords: tuple[float, float, float]

    def __post_init__(self):
        if self.chart not in _CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}; expected one of {_CHARTS}")
        if len(self.coords) != 3:
            raise ValueError("chart coordinates are 3-dimensional")
        object.__setattr__(self, "coords", tuple(float(x) for x in self.coords))
        if not all(math.isfinite(x) for x in self.coords):
            raise ValueError(f"non-finite chart coordinates {self.coords}")
        radial = self.coords[2] if self.chart == "K_eps" else self.coords[0]
        if radial < 0.0:
            raise ValueError(f"radial coordinate {radial:g} must be >= 0")
        if self.chart == "K_W" and self.coords[1] < 0.0:
            raise ValueError(f"eps2 = {self.coords[1]:g} must be >= 0")


@dataclass(frozen=True)
class BlowdownPoint:
    t_tilde: float
    w_tilde: float
    eps: float


def blowdown(pt: ChartPoint) -> BlowdownPoint:
    """Monomial blow-down of a chart point to the corner variables."""
    if pt.chart == "K_eps":
        t1, w1, r1 = pt.coords
        return BlowdownPoint(r1**3 * t1, -(r1**2) * w1, r1)
    r2, e2, t2 = pt.coords
    return BlowdownPoint(r2**3 * t2, -(r2**2), r2 * e2)


def keps_to_kw(t1: float, w1: float, r1: float) -> tuple[float, float, float]:
    """Chart transition K_eps -> K_W, defined on W1 > 0."""
    if not w1 > 0.0:
        raise ChartOverlapError(f"transition needs W1 > 0, got {w1:g}")
    sw = math.sqrt(w1)
    return r1 * sw, 1.0 / sw, t1 / (w1 * sw)


def kw_to_keps(r2: float, e2: float, t2: float) -> tuple[float, float, float]:
    """Chart transition K_W -> K_eps, defined on eps2 > 0."""
    if not e2 > 0.0:
        raise ChartOverlapError(f"transition needs eps2 > 0, got {e2:g}")
    return t2 / e2**3, 1.0 / e2**2, r2 * e2


def hamiltonian(t1: float, w1: float, c: float) -> float:
    """Conserved quantity of the rescaling-chart flow on its sphere slice."""
    return w1**3 / 3.0 - 0.25 * c * c * w1 * w1 - 0.5 * t1 * t1


def unstable_graph_keps(w1: float, c: float) -> float:
    """Unstable-manifold branch of the rescaling-chart saddle as a graph
    T1(W1) on its energy level.

    Uses the factored radicand (2/3)(W1 - c^2/2)^2 (W1 + c^2/4), which is
    exactly zero at the saddle instead of cancelling in rounding."""
    half = 0.5 * c * c
    rad = (2.0 / 3.0) * (w1 - half) ** 2 * (w1 + 0.5 * half)
    if rad < 0.0:
        raise ValueError(f"graph undefined for W1 < {-0.5 * half:g}, got {w1:g}")
    return -math.sqrt(rad)


def keps_saddle_w1(c: float, eps: float) -> float:
    """W1 location of the rescaling-chart saddle on the slice r1 = eps,
    written cancellation-free; c^2/2 in the blown-up limit."""
    e2c = eps * eps * c
    return c * c / (1.0 + math.sqrt(1.0 + e2c * e2c))


@dataclass(frozen=True)
class KwFixedPoint:
    eps2: float
    t2: float
    attractor: bool


def kw_fixed_points(c: float) -> list[KwFixedPoint]:
    """Fixed points of the edge-chart flow restricted to r2 = 0, in the
    (eps2, T2) plane, with the attracting one flagged."""
    if not c > 0.0:
        raise ValueError("c must be positive")
    s = math.sqrt(2.0) / c
    return [
        KwFixedPoint(0.0, _Q, False),
        KwFixedPoint(0.0, -_Q, True),
        KwFixedPoint(s, 0.0, False),
        KwFixedPoint(-s, 0.0, False),
    ]


def phi_kappa(c: float, kappa: float, seed_r2: float = 1e-10) -> float:
    """T2 offset (from -sqrt(2/3)) of the attractor's unstable manifold in
    the invariant slice eps2 = 0, followed out to r2 = kappa.

    The slice flow keeps T2 = -sqrt(2/3) invariant, so the returned value is
    a numerical zero; it is integrated rather than assumed so the transition
    check does not presuppose what it verifies."""
    _check_kappa(kappa)
    traj = integrate(
        lambda t, s: eval_chart_kw(s, c),
        (seed_r2, 0.0, -_Q),
        (0.0, 600.0),
        sections=[Section(component=0, threshold=kappa, direction=+1)],
        box=((-1e-9, 2.0 * kappa + 1.0), (-1e-9, 1.0), (-3.0, 1.0)),
    )
    if traj.status != "event-stopped":
        raise RuntimeError(
            f"slice flow never reached r2={kappa:g}: status={traj.status} "
            f"{traj.message}".rstrip()
        )
    return traj.final_state[2] + _Q


def _check_kappa(kappa: float) -> None:
    if not (0.0 < kappa <= 0.5):
        raise ValueError(f"kappa must lie in (0, 0.5], got {kappa:g}")


@dataclass(frozen=True)
class TransitionEntry:
    eps: float
    r2_in: float
    s2_in: float
    sigma_star: float
    eps2_out: float
    s2_out: float
    d: float
    ratio: float
    conservation_error: float


@dataclass(frozen=True)
class TransitionReport:
    c: float
    kappa: float
    phi: float
    entries: tuple[TransitionEntry, ...]
    failures: tuple[tuple[float, str], ...]
    ratio_spread: float | None
    passed: bool


def _run_transition(c: float, kappa: float, eps: float, phi: float) -> TransitionEntry:
    w1_sec = 1.0 / (kappa * kappa)
    w1_star = keps_saddle_w1(c, eps)

    jac = numerical_jacobian(
        lambda s: eval_chart_keps((s[0], s[1], eps), c)[:2], (0.0, w1_star)
    )
    pairs = eigen2(jac)
    idx = max(range(2), key=lambda i: _re(pairs.values[i]))
    lam = _re(pairs.values[idx])
    if not lam > 1e-12:
        raise RuntimeError(f"chart saddle lost hyperbolicity at eps={eps:g}")
    v = [_re(x) for x in pairs.vectors[idx]]
    if v[1] < 0.0:  # branch heading toward the hand-off section
        v = [-v[0], -v[1]]
    seed = (1e-8 * v[0], w1_star + 1e-8 * v[1], eps)
    shot = integrate(
        lambda t, s: eval_chart_keps(s, c),
        seed,
        (0.0, 400.0),
        sections=[Section(component=1, threshold=w1_sec, direction=+1)],
        box=((-1e6, 1.0), (-1.0, w1_sec + 1.0), (eps - 1.0, eps + 1.0)),
    )
    if shot.status != "event-stopped":
        raise RuntimeError(
            f"manifold shot missed the hand-off section at eps={eps:g}: "
            f"status={shot.status} {shot.message}".rstrip()
        )
    t1, w1 = shot.final_state[0], shot.final_state[1]
    r2_in, e2_in, t2_in = keps_to_kw(t1, w1, eps)

    # corner flight; entering beyond the exit section means flowing backward
    span = (0.0, 400.0) if r2_in < kappa else (0.0, -400.0)
    flight = integrate(
        lambda t, s: eval_chart_kw(s, c),
        (r2_in, e2_in, t2_in),
        span,
        sections=[Section(component=0, threshold=kappa, direction=0)],
        box=(
            (-1e-9, 2.0 * max(r2_in, kappa) + 1.0),
            (-1e-9, 4.0 * max(e2_in, 1.0)),
            (-3.0, 1.0),
        ),
    )
    if flight.status != "event-stopped":
        raise RuntimeError(
            f"corner flight missed the exit section at eps={eps:g}: "
            f"status={flight.status} {flight.message}".rstrip()
        )
    r2_o, e2_o, t2_o = flight.final_state
    cons = max(abs(s[0] * s[1] - eps) for s in flight.states)
    s2_out = t2_o + _Q
    d = math.hypot(e2_o, s2_out - phi)
    return TransitionEntry(
        eps=eps,
        r2_in=r2_in,
        s2_in=t2_in + _Q,
        sigma_star=math.log(kappa / r2_in),
        eps2_out=e2_o,
        s2_out=s2_out,
        d=d,
        ratio=d / eps,
        conservation_error=cons,
    )


def _transition_entry(job):
    c, kappa, eps, phi = job
    try:
        return "ok", _run_transition(c, kappa, eps, phi)
    except (ValueError, RuntimeError) as err:
        return "err", (eps, f"{type(err).__name__}: {err}")


def verify_transition(
    c: float,
    kappa: float,
    eps_list: Sequence[float],
    workers: int = 1,
) -> TransitionReport:
    """Track the front manifold through the corner for each eps and measure
    its exit-section distance d(eps) from the singular-limit exit point.

    The report passes when the ratios d(eps)/eps agree within a factor of 3
    across the list, the numerical form of the corner passage being a
    bounded-deflection O(eps) estimate."""
    _check_kappa(kappa)
    eps_vals = [float(e) for e in eps_list]
    if not eps_vals:
        raise ValueError("empty epsilon list")
    if any(e <= 0.0 for e in eps_vals):
        raise ValueError("epsilons must be positive")
    phi = phi_kappa(c, kappa)
    jobs = [(float(c), float(kappa), e, phi) for e in eps_vals]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_transition_entry, jobs, chunksize=1))
    else:
        outcomes = [_transition_entry(j) for j in jobs]
    entries: list[TransitionEntry] = []
    failures: list[tuple[float, str]] = []
    for tag, payload in outcomes:
        (entries if tag == "ok" else failures).append(payload)
    spread = None
    if entries:
        ratios = [e.ratio for e in entries]
        spread = max(ratios) / min(ratios)
    passed = bool(entries) and not failures and spread is not None and spread < 3.0
    return TransitionReport(
        c=float(c),
        kappa=float(kappa),
        phi=phi,
        entries=tuple(entries),
        failures=tuple(failures),
        ratio_spread=spread,
        passed=passed,
    )
