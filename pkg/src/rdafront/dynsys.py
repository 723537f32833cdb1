"""Phase-plane vector fields of the traveling-wave problem and a small
adaptive integrator with section-crossing detection.

States are plain tuples of floats and fields are plain callables
``field(t, state) -> tuple``, so everything here composes without array
machinery.  The integrator is an embedded Dormand-Prince 5(4) pair with PI
step-size control; section crossings are bracketed on a cubic-Hermite
interpolant and then polished on exact Runge-Kutta substates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

__all__ = [
    "Params",
    "Section",
    "Event",
    "Trajectory",
    "SingularLineError",
    "eval_scaled_tw",
    "eval_desing_tw",
    "eval_reduced",
    "eval_chart_keps",
    "eval_chart_kw",
    "integrate",
    "front_box",
    "trajectory_csv",
]


class SingularLineError(ValueError):
    """Raised when the non-desingularized field is evaluated on W = c."""


@dataclass(frozen=True)
class Params:
    """Wave speed and singular parameter of the scaled traveling-wave system.

    ``eps = 0`` is the reduced (singular) limit; for ``eps > 0`` the original
    stiffness parameter is ``rho = eps**-3``.
    """

    c: float
    eps: float = 0.0

    def __post_init__(self) -> None:
        if not (self.c > 0.0):
            raise ValueError(f"wave speed must be positive, got {self.c}")
        if not (self.eps >= 0.0):
            raise ValueError(f"eps must be nonnegative, got {self.eps}")

    @property
    def rho(self) -> float:
        if self.eps <= 0.0:
            raise ValueError("rho is only defined for eps > 0")
        return self.eps ** -3


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------

def eval_scaled_tw(s: Sequence[float], p: Params) -> tuple:
    """Right-hand side of the scaled traveling-wave system in the spatial
    variable X.  Singular on the line W = c."""
    T, W = s
    c, e = p.c, p.eps
    if abs(W - c) < 1e-14:
        raise SingularLineError(f"state W={W} is on the singular line W=c={c}")
    dT = T * (W - c) + 0.5 * e * e * W * (2.0 * c - W)
    dW = T * (1.0 - T) / (W - c)
    return (dT, dW)


def eval_desing_tw(s: Sequence[float], p: Params) -> tuple:
    """Desingularized traveling-wave field: the scaled field multiplied by
    (c - W), which removes the singular line and reverses no orbits on the
    front strip W < c."""
    T, W = s
    c, e = p.c, p.eps
    wc = W - c
    dT = -T * wc * wc - 0.5 * e * e * W * (2.0 * c - W) * wc
    dW = -T * (1.0 - T)
    return (dT, dW)


def eval_reduced(s: Sequence[float], c: float) -> tuple:
    """Desingularized field at eps = 0.  Conserves (W-c)^3/3 - T + T^2/2."""
    T, W = s
    wc = W - c
    return (-T * wc * wc, -T * (1.0 - T))


def eval_chart_keps(s: Sequence[float], c: float) -> tuple:
    """Desingularized rescaling-chart field (T1, W1, r1); r1 is constant.

    At r1 = 0 this is the planar Hamiltonian limit used to locate the
    unstable manifold of the chart saddle in closed form.
    """
    T1, W1, r1 = s
    a = 1.0 + r1 ** 3 * T1
    dT1 = -W1 * W1 * a + 0.5 * W1 * (c * c - r1 ** 4 * W1 * W1)
    dW1 = -T1 * a
    return (dT1, dW1, 0.0)


def eval_chart_kw(s: Sequence[float], c: float) -> tuple:
    """Desingularized edge-chart field (r2, eps2, T2).

    The product r2*eps2 is exactly conserved; it equals the blown-down
    value of eps.
    """
    r2, e2, T2 = s
    a = 1.0 + r2 ** 3 * T2
    dr2 = -0.5 * r2 * T2 * a
    de2 = 0.5 * e2 * T2 * a
    dT2 = -a + 0.5 * e2 * e2 * (c * c - r2 ** 4) + 1.5 * T2 * T2 * a
    return (dr2, de2, dT2)


def front_box(p: Params) -> tuple:
    """Default integration box for front orbits of the planar fields."""
    return ((-0.1, 1.1), (-1.0, p.c + 1.0))


# ---------------------------------------------------------------------------
# sections, events, trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Section:
    """A codimension-one section {state[component] = threshold}.

    direction > 0 detects upward crossings of the monitored component,
    direction < 0 downward ones, direction = 0 both.  A terminal section
    stops the integration at its first crossing.
    """

    component: int
    threshold: float
    direction: int = 0
    terminal: bool = True

    def __post_init__(self) -> None:
        if not math.isfinite(self.threshold):
            raise ValueError("section threshold must be finite")


@dataclass(frozen=True)
class Event:
    section: int
    t: float
    state: tuple


@dataclass
class Trajectory:
    ts: list = dc_field(default_factory=list)
    states: list = dc_field(default_factory=list)
    events: list = dc_field(default_factory=list)
    status: str = "completed"
    message: str = ""
    naccepted: int = 0
    nrejected: int = 0

    def samples(self):
        return list(zip(self.ts, self.states))

    @property
    def final_state(self) -> tuple:
        return self.states[-1]


def trajectory_csv(traj: Trajectory) -> str:
    """Render a trajectory as CSV, 17 significant digits per value."""
    dim = len(traj.states[0]) if traj.states else 0
    lines = ["t," + ",".join(f"comp{i}" for i in range(dim))]
    for t, y in zip(traj.ts, traj.states):
        lines.append(",".join(format(v, ".17g") for v in (t, *y)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with PI step control
# ---------------------------------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# fifth-order weights equal the last A row (first-same-as-last pair)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_SAFETY = 0.9
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_FACMIN = 0.2
_FACMAX = 10.0


def _rk_step(f, t, y, h, k1):
    """One 5(4) step; returns (y5, err_vec, stages).

    The last stage sits at (t+h, y5), so it doubles as the first stage of
    the next step (first-same-as-last).
    """
    k = [k1]
    n = len(y)
    y5 = y
    for i in range(1, 7):
        yi = list(y)
        for j, a in enumerate(_A[i]):
            if a != 0.0:
                kj = k[j]
                for m in range(n):
                    yi[m] += h * a * kj[m]
        yi = tuple(yi)
        if i == 6:
            y5 = yi
        k.append(f(t + _C[i] * h, yi))
    err = [0.0] * n
    for j, e in enumerate(_E):
        if e != 0.0:
            kj = k[j]
            for m in range(n):
                err[m] += h * e * kj[m]
    return y5, err, k


def _error_norm(err, y0, y1, atol, rtol):
    acc = 0.0
    for e, a, b in zip(err, y0, y1):
        sc = atol + rtol * max(abs(a), abs(b))
        q = e / sc
        acc += q * q
    return math.sqrt(acc / len(err))


def _initial_step(f, t0, y0, f0, direction, atol, rtol, span):
    scale = [atol + rtol * abs(v) for v in y0]
    d0 = math.sqrt(sum((v / s) ** 2 for v, s in zip(y0, scale)) / len(y0))
    d1 = math.sqrt(sum((v / s) ** 2 for v, s in zip(f0, scale)) / len(y0))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = tuple(v + direction * h0 * w for v, w in zip(y0, f0))
    f1 = f(t0 + direction * h0, y1)
    d2 = math.sqrt(
        sum(((a - b) / s) ** 2 for a, b, s in zip(f1, f0, scale)) / len(y0)
    ) / h0
    dm = max(d1, d2)
    h1 = (0.01 / dm) ** 0.2 if dm > 1e-15 else max(1e-6, h0 * 1e-3)
    return min(100.0 * h0, h1, abs(span))


def _hermite(theta, h, y0, y1, f0, f1, comp):
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + theta
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    return h00 * y0[comp] + h10 * h * f0[comp] + h01 * y1[comp] + h11 * h * f1[comp]


def _crossed(g0, g1, direction):
    up = g0 < 0.0 <= g1
    down = g0 > 0.0 >= g1
    if direction > 0:
        return up
    if direction < 0:
        return down
    return up or down


def integrate(
    field: Callable,
    x0: Sequence[float],
    span: tuple,
    atol: float = 1e-10,
    rtol: float = 1e-8,
    sections: Sequence[Section] = (),
    box: Optional[Sequence[tuple]] = None,
    max_steps: int = 10_000_000,
    max_step: float = math.inf,
) -> Trajectory:
    """Integrate ``field`` over ``span = (t0, t1)`` (either direction).

    Section crossings are located to independent-variable accuracy 1e-12:
    first bracketed by bisection on the cubic-Hermite interpolant of the
    accepted step, then polished with Newton corrections evaluated on exact
    Runge-Kutta substeps so the crossing state itself carries integration
    accuracy rather than interpolation accuracy.  The first terminal
    crossing ends the run with status ``event-stopped``.  Leaving ``box``
    ends it with ``domain-exit``; a step size underflow (or exceeding
    ``max_steps``) ends it with ``step-failure``.
    """
    if atol <= 0.0 or rtol <= 0.0:
        raise ValueError("tolerances must be positive")
    t0, t1 = float(span[0]), float(span[1])
    y = tuple(float(v) for v in x0)
    direction = 1.0 if t1 >= t0 else -1.0
    traj = Trajectory()
    traj.ts.append(t0)
    traj.states.append(y)
    if t1 == t0:
        return traj

    def f(t, s):
        return field(t, s)

    t = t0
    k1 = f(t, y)
    h = _initial_step(f, t, y, k1, direction, atol, rtol, t1 - t0) * direction
    if abs(h) > max_step:
        h = max_step * direction
    err_prev = 1e-4
    rejected = False

    while traj.naccepted + traj.nrejected < max_steps:
        if (t + h - t1) * direction > 0.0:
            h = t1 - t
        if abs(h) < 1e-14 * max(1.0, abs(t)):
            traj.status = "step-failure"
            traj.message = f"step size {h:g} underflowed at t={t:g}"
            return traj
        y1, errv, k = _rk_step(f, t, y, h, k1)
        if not all(math.isfinite(v) for v in y1):
            err = math.inf
        else:
            err = _error_norm(errv, y, y1, atol, rtol)
        if err > 1.0:
            traj.nrejected += 1
            fac = max(_FACMIN, _SAFETY * err ** (-_ALPHA))
            h *= min(1.0, fac)
            rejected = True
            continue

        # accepted
        traj.naccepted += 1
        f0, f1 = k1, k[6]
        t_new = t + h

        # locate section crossings inside (t, t_new)
        hits = []
        for si, sec in enumerate(sections):
            g0 = y[sec.component] - sec.threshold
            g1 = y1[sec.component] - sec.threshold
            if not _crossed(g0, g1, sec.direction):
                continue
            lo, hi = 0.0, 1.0
            glo = g0
            while abs(h) * (hi - lo) > 1e-12:
                mid = 0.5 * (lo + hi)
                gm = _hermite(mid, h, y, y1, f0, f1, sec.component) - sec.threshold
                if _crossed(glo, gm, sec.direction):
                    hi = mid
                else:
                    lo, glo = mid, gm
            theta = 0.5 * (lo + hi)
            hits.append((theta, si))
        hits.sort()

        stop_event = None
        for theta, si in hits:
            sec = sections[si]
            # polish on exact substeps from (t, y)
            te = t + theta * h
            ye = y
            for _ in range(4):
                he = te - t
                if he == 0.0:
                    ye = y
                    fe = f0
                else:
                    ye, _, ke = _rk_step(f, t, y, he, k1)
                    fe = ke[6]
                g = ye[sec.component] - sec.threshold
                dg = fe[sec.component]
                if abs(g) < 1e-13 * max(1.0, abs(sec.threshold)) or dg == 0.0:
                    break
                te_new = te - g / dg
                lo_t, hi_t = (t, t_new) if h > 0 else (t_new, t)
                te = min(max(te_new, lo_t), hi_t)
            event = Event(si, te, ye)
            traj.events.append(event)
            if sec.terminal:
                stop_event = event
                break
        if stop_event is not None:
            traj.ts.append(stop_event.t)
            traj.states.append(stop_event.state)
            traj.status = "event-stopped"
            return traj

        traj.ts.append(t_new)
        traj.states.append(y1)

        if box is not None:
            inside = all(lo <= v <= hi for v, (lo, hi) in zip(y1, box))
            if not inside:
                traj.status = "domain-exit"
                traj.message = f"state left the domain box at t={t_new:g}"
                return traj

        if (t_new - t1) * direction >= 0.0:
            traj.status = "completed"
            return traj

        # PI controller; floor err so exactly integrable steps do not divide by zero
        fac = _SAFETY * max(err, 1e-10) ** (-_ALPHA) * err_prev ** _BETA
        fac = min(1.0 if rejected else _FACMAX, max(_FACMIN, fac))
        h *= fac
        if abs(h) > max_step:
            h = max_step * direction
        err_prev = max(err, 1e-10)
        rejected = False
        t, y, k1 = t_new, y1, f1

    traj.status = "step-failure"
    traj.message = f"exceeded {max_steps} steps"
    return traj
