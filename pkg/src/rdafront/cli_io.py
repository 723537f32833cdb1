"""Command-line front end, configuration, and serialization.

One binary, subcommand style.  Numeric output is written at 17 significant
digits so re-reading reproduces every value bit-exactly, and, given
identical configs, runs are byte-identical regardless of worker count.

Exit codes: 0 success, 2 no root in bracket, 3 integration or shooting
failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .blowup import verify_transition
from .dynsys import (
    Params,
    Section,
    SingularLineError,
    eval_chart_keps,
    eval_chart_kw,
    eval_desing_tw,
    front_box,
    integrate,
    trajectory_csv,
)
from .equilibria import eigen2, equilibria_desing, numerical_jacobian, w_minus
from .kernels import BACKEND
from .manifolds import ShootError, shoot_strong_stable, shoot_unstable
from .pde_sim import Grid, measure_speed
from .rootfind import BracketError
from .speed_solver import front_decay_reference, front_profile, solve_speed, sweep


class UsageError(Exception):
    """Bad flags or config; maps to exit code 64."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    params: dict


# ---------------------------------------------------------------------------
# Deterministic serialization
# ---------------------------------------------------------------------------


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _dump(v, ind: str) -> str:
    if isinstance(v, dict):
        if not v:
            return "{}"
        body = ",\n".join(
            f'{ind}  {json.dumps(str(k))}: {_dump(x, ind + "  ")}' for k, x in v.items()
        )
        return "{\n" + body + "\n" + ind + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        body = ",\n".join(f'{ind}  {_dump(x, ind + "  ")}' for x in v)
        return "[\n" + body + "\n" + ind + "]"
    return _scalar(v)


def dumps(doc: dict) -> str:
    return _dump(doc, "") + "\n"


def csv_table(header: str, rows) -> str:
    lines = [header]
    for row in rows:
        lines.append(
            ",".join(fmt(v) if isinstance(v, float) else str(v) for v in row)
        )
    return "\n".join(lines) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # argparse calls error() for unknown flags, bad choices, and missing
    # values; routing it through UsageError keeps exit-code control here
    def error(self, message):
        raise UsageError(message)


_DEFAULTS = {
    "speed": {"eps": None, "bracket": (1.0, 1.8), "tol": 1e-10},
    "sweep": {
        "eps_list": None,
        "bracket": (1.0, 1.8),
        "tol": 1e-10,
        "workers": 1,
        "out": None,
    },
    "shoot": {
        "c": None,
        "eps": None,
        "side": None,
        "delta": 1e-6,
        "threshold": 0.5,
        "orbit_out": None,
    },
    "profile": {
        "eps": None,
        "c": None,
        "x_span": (0.0, 60.0),
        "delta": 1e-6,
        "out": None,
    },
    "phase": {"eps": None, "c": None, "out": None},
    "equilibria": {"eps": None, "c": None},
    "blowup": {
        "action": None,
        "c": None,
        "kappa": 0.3,
        "eps_list": None,
        "workers": 1,
        "chart": None,
        "r": 0.0,
        "out": None,
    },
    "pde": {
        "rho": None,
        "L": 300.0,
        "dx": 0.02,
        "tmax": 30.0,
        "out_every": 0.5,
        "out": None,
        "snapshots": None,
        "snap_times": (),
    },
}

_FLOAT_KEYS = frozenset(
    {"eps", "c", "tol", "delta", "threshold", "kappa", "r", "rho", "L", "dx", "tmax", "out_every"}
)
_INT_KEYS = frozenset({"workers"})
_PAIR_KEYS = frozenset({"bracket", "x_span"})
_LIST_KEYS = frozenset({"eps_list", "snap_times"})
_PATH_KEYS = frozenset({"out", "orbit_out", "snapshots"})
_CHOICE_KEYS = {"side": ("u", "s"), "chart": ("keps", "kw")}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _floats_csv(text: str) -> tuple:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise UsageError(f"bad numeric list {text!r}") from exc


def _add_common(sp, names) -> None:
    for name in names:
        if name == "action":
            continue
        flag = _flag(name)
        if name in _FLOAT_KEYS:
            sp.add_argument(flag, type=float, default=None)
        elif name in _INT_KEYS:
            sp.add_argument(flag, type=int, default=None)
        elif name in _PAIR_KEYS:
            sp.add_argument(flag, type=float, nargs=2, default=None, metavar=("LO", "HI"))
        elif name in _LIST_KEYS:
            sp.add_argument(flag, type=str, default=None, metavar="V1,V2,...")
        elif name in _CHOICE_KEYS:
            sp.add_argument(flag, choices=_CHOICE_KEYS[name], default=None)
        else:
            sp.add_argument(flag, type=str, default=None, metavar="PATH")


def _build() -> _Parser:
    top = _Parser(prog="rdafront", add_help=True)
    subs = top.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, spec in _DEFAULTS.items():
        sp = subs.add_parser(name)
        if name == "blowup":
            sp.add_argument("action", choices=("verify", "portrait"))
        _add_common(sp, spec.keys())
        sp.add_argument("--config", type=str, default=None, metavar="FILE.json")
    return top


def _coerce(key: str, value):
    """Bring a config-file value to the same type a flag would produce."""
    try:
        if key in _FLOAT_KEYS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise UsageError(f"config key {key!r} must be a number")
            return float(value)
        if key in _INT_KEYS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise UsageError(f"config key {key!r} must be an integer")
            return int(value)
        if key in _PAIR_KEYS:
            pair = tuple(float(v) for v in value)
            if len(pair) != 2:
                raise UsageError(f"config key {key!r} needs exactly two numbers")
            return pair
        if key in _LIST_KEYS:
            if isinstance(value, str):
                return _floats_csv(value)
            return tuple(float(v) for v in value)
        if key in _CHOICE_KEYS:
            if value not in _CHOICE_KEYS[key]:
                raise UsageError(
                    f"config key {key!r} must be one of {_CHOICE_KEYS[key]}"
                )
            return value
        return str(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"config key {key!r} has a bad value: {value!r}") from exc


def _load_config(sub: str, path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError(f"config {path!r} must hold a JSON object")
    known = set(_DEFAULTS[sub]) - {"action"}
    out = {}
    for key, value in raw.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise UsageError(f"unknown config key {key!r} for subcommand {sub!r}")
        if value is None:
            continue
        out[dest] = _coerce(dest, value)
    return out


def _need(params: dict, *names: str) -> None:
    for name in names:
        if params.get(name) is None:
            raise UsageError(f"missing required flag {_flag(name)}")


def _positive(params: dict, *names: str) -> None:
    for name in names:
        v = params.get(name)
        if v is not None and not v > 0.0:
            raise UsageError(f"{_flag(name)} must be positive")


def _validate(sub: str, params: dict) -> None:
    if "eps" in params and params["eps"] is not None and params["eps"] < 0.0:
        raise UsageError("--eps must be nonnegative")
    if params.get("bracket") is not None:
        lo, hi = params["bracket"]
        if not (0.0 < lo < hi):
            raise UsageError("--bracket needs 0 < LO < HI")
    _positive(params, "tol", "delta", "c", "kappa")
    if params.get("workers") is not None and params["workers"] < 1:
        raise UsageError("--workers must be at least 1")
    if sub == "speed":
        _need(params, "eps")
    elif sub == "sweep":
        _need(params, "eps_list")
        eps = params["eps_list"]
        if not eps or any(e <= 0.0 for e in eps):
            raise UsageError("--eps-list needs positive entries")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise UsageError("--eps-list must be strictly descending")
    elif sub == "shoot":
        _need(params, "c", "eps", "side")
        if params["side"] == "u" and params["eps"] == 0.0:
            raise UsageError("--side u needs --eps > 0")
        th = params["threshold"]
        if not (0.0 < th < 1.0):
            raise UsageError("--threshold must lie in (0, 1)")
    elif sub == "profile":
        # --c defaults to the selected speed for this eps
        _need(params, "eps")
        if params["eps"] == 0.0:
            raise UsageError("--eps must be positive for profile")
        x0, x1 = params["x_span"]
        if not x1 > x0:
            raise UsageError("--x-span needs LO < HI")
    elif sub == "phase":
        _need(params, "eps")
    elif sub == "equilibria":
        _need(params, "eps", "c")
    elif sub == "blowup":
        if params["action"] == "verify":
            _need(params, "c", "eps_list")
            if params["kappa"] > 0.5:
                raise UsageError("--kappa must lie in (0, 0.5]")
            eps = params["eps_list"]
            if not eps or any(e <= 0.0 for e in eps):
                raise UsageError("--eps-list needs positive entries")
        else:
            _need(params, "chart", "c")
    elif sub == "pde":
        _need(params, "rho")
        _positive(params, "rho", "L", "dx", "tmax", "out_every")
        if params["tmax"] < 4.0 * params["out_every"]:
            raise UsageError("--tmax must cover at least four output intervals")
        if params["L"] / params["dx"] < 100.0:
            raise UsageError("--dx too coarse: need at least 100 cells over --L")
        if any(t < 0.0 for t in params["snap_times"]):
            raise UsageError("--snap-times must be nonnegative")


def parse(args: Sequence[str]) -> RunConfig:
    """Deterministic parse: config-file values replace builtin defaults,
    explicit flags override both; unknown flags and keys are errors."""
    ns = _build().parse_args(list(args))
    sub = ns.subcommand
    explicit = {
        k: v
        for k, v in vars(ns).items()
        if k not in ("subcommand", "config") and v is not None
    }
    for key in _LIST_KEYS:
        if key in explicit and isinstance(explicit[key], str):
            explicit[key] = _floats_csv(explicit[key])
    for key in _PAIR_KEYS:
        if key in explicit:
            explicit[key] = tuple(explicit[key])
    params = dict(_DEFAULTS[sub])
    if getattr(ns, "config", None):
        params.update(_load_config(sub, ns.config))
    params.update(explicit)
    _validate(sub, params)
    return RunConfig(sub, params)


# ---------------------------------------------------------------------------
# Subcommand runners
# ---------------------------------------------------------------------------


def _config_doc(params: dict) -> dict:
    # scheduling and output-routing knobs do not describe the computation,
    # so they stay out of the echo (outputs must not depend on them)
    skip = ("workers", "out", "orbit_out", "snapshots", "snap_times")
    return {
        k: (list(v) if isinstance(v, tuple) else v)
        for k, v in params.items()
        if k not in skip
    }


def _run_speed(p: dict) -> int:
    res = solve_speed(p["eps"], p["bracket"], p["tol"])
    doc = {
        "subcommand": "speed",
        "eps": res.eps,
        "c_star": res.c_star,
        "rho": res.rho,
        "ctilde_star": res.ctilde_star,
        "residual": res.residual,
        "bracket": list(res.bracket),
        "iterations": res.iterations,
        "config": _config_doc(p),
    }
    sys.stdout.write(dumps(doc))
    return 0


def _run_sweep(p: dict) -> int:
    summ = sweep(p["eps_list"], p["bracket"], p["tol"], p["workers"])
    if not summ.results:
        for eps, msg in summ.failures:
            print(f"error: eps={eps:g}: {msg}", file=sys.stderr)
        return 2
    rows = [
        (
            r.eps,
            r.c_star,
            r.rho,
            r.ctilde_star,
            r.ctilde_star / r.rho ** (1.0 / 3.0),
            r.residual,
            r.iterations,
        )
        for r in summ.results
    ]
    table = csv_table("eps,c_star,rho,ctilde_star,ratio,residual,iters", rows)
    if p["out"] is None:
        sys.stdout.write(table)
        return 0
    _emit(table, p["out"])
    doc = {
        "subcommand": "sweep",
        "count": len(summ.results),
        "failures": [[eps, msg] for eps, msg in summ.failures],
        "order": summ.order,
        "extrapolated": summ.extrapolated,
        "limit_reference": summ.limit_reference,
        "out": p["out"],
        "config": _config_doc(p),
    }
    sys.stdout.write(dumps(doc))
    return 0


def _run_shoot(p: dict) -> int:
    pp = Params(c=p["c"], eps=p["eps"])
    shot = shoot_unstable if p["side"] == "u" else shoot_strong_stable
    res = shot(pp, p["delta"], p["threshold"])
    if p["orbit_out"] is not None:
        _emit(trajectory_csv(res.orbit), p["orbit_out"])
    doc = {
        "subcommand": "shoot",
        "section_W": res.section_W,
        "seed_offset": res.seed_offset,
        "steps": res.steps,
        "converged": res.converged,
        "config": _config_doc(p),
    }
    sys.stdout.write(dumps(doc))
    return 0


def _run_profile(p: dict) -> int:
    if p["c"] is None:
        p = dict(p, c=solve_speed(p["eps"]).c_star)
    prof = front_profile(p["eps"], p["c"], p["x_span"], p["delta"])
    ref = front_decay_reference(Params(c=p["c"], eps=p["eps"]))
    doc = {
        "subcommand": "profile",
        "decay_rate": prof.decay_rate,
        "decay_reference": ref,
        "relative_gap": abs(prof.decay_rate - ref) / ref,
        "monotone": prof.monotone,
        "samples": len(prof.samples),
        "config": _config_doc(p),
    }
    sys.stdout.write(dumps(doc))
    if p["out"] is not None:
        _emit(csv_table("X,T,W", prof.samples), p["out"])
    return 0


def _real(z):
    return z.real if isinstance(z, complex) else z


def _phase_orbit(c: float, eps: float):
    """Front orbit for plotting, integrated at tight tolerance.

    At eps = 0 the backward strong-stable orbit of the origin carries the
    whole connection, so its samples stay on the conserved level set; at
    eps > 0 the forward unstable orbit of the front saddle is used.
    """
    p = Params(c=c, eps=eps)
    if eps == 0.0:
        point, forward, threshold, direction = (0.0, 0.0), False, 0.995, +1
    else:
        point, forward, threshold, direction = (1.0, w_minus(c, eps)), True, 1e-4, -1
    jac = numerical_jacobian(lambda s: eval_desing_tw(s, p), point)
    pairs = eigen2(jac)
    if forward:
        idx = max(range(2), key=lambda i: _real(pairs.values[i]))
    else:
        idx = min(range(2), key=lambda i: _real(pairs.values[i]))
    lam = _real(pairs.values[idx])
    v = tuple(_real(x) for x in pairs.vectors[idx])
    want_down = forward  # leaving the saddle T must drop; leaving the origin it must rise
    if (v[0] > 0.0) == want_down:
        v = (-v[0], -v[1])
    delta = 1e-8
    seed = (point[0] + delta * v[0], point[1] + delta * v[1])
    horizon = 400.0 / max(abs(lam), 1e-3)
    span = (0.0, horizon) if forward else (0.0, -horizon)
    traj = integrate(
        lambda t, s: eval_desing_tw(s, p),
        seed,
        span,
        sections=[Section(component=0, threshold=threshold, direction=direction)],
        box=front_box(p),
        atol=1e-13,
        rtol=3e-13,
    )
    if traj.status != "event-stopped":
        raise ShootError(
            f"phase orbit did not reach T={threshold:g}: status={traj.status}"
        )
    return traj


def _run_phase(p: dict) -> int:
    c = p["c"] if p["c"] is not None else solve_speed(p["eps"]).c_star
    traj = _phase_orbit(c, p["eps"])
    _emit(trajectory_csv(traj), p["out"])
    return 0


def _eig_doc(z) -> list:
    return [_real(z), z.imag if isinstance(z, complex) else 0.0]


def _run_equilibria(p: dict) -> int:
    eqs = equilibria_desing(Params(c=p["c"], eps=p["eps"]))
    doc = {
        "subcommand": "equilibria",
        "count": len(eqs),
        "points": [
            {
                "location": list(e.location),
                "kind": e.kind,
                "eigenvalues": [_eig_doc(z) for z in e.eigenpairs.values],
            }
            for e in eqs
        ],
        "config": _config_doc(p),
    }
    sys.stdout.write(dumps(doc))
    return 0


def _chart_grid(lo: float, hi: float, n: int) -> list:
    return [lo + i * (hi - lo) / (n - 1) for i in range(n)]


def _run_blowup(p: dict) -> int:
    if p["action"] == "verify":
        rep = verify_transition(p["c"], p["kappa"], p["eps_list"], p["workers"])
        doc = {
            "subcommand": "blowup",
            "action": "verify",
            "c": rep.c,
            "kappa": rep.kappa,
            "phi": rep.phi,
            "entries": [
                {
                    "eps": e.eps,
                    "r2_in": e.r2_in,
                    "s2_in": e.s2_in,
                    "sigma_star": e.sigma_star,
                    "eps2_out": e.eps2_out,
                    "s2_out": e.s2_out,
                    "d": e.d,
                    "ratio": e.ratio,
                    "conservation_error": e.conservation_error,
                }
                for e in rep.entries
            ],
            "failures": [[eps, msg] for eps, msg in rep.failures],
            "ratio_spread": rep.ratio_spread,
            "pass": rep.passed,
            "config": _config_doc(p),
        }
        sys.stdout.write(dumps(doc))
        return 0 if rep.passed else 3
    c, r = p["c"], p["r"]
    n = 33
    if p["chart"] == "keps":
        rows = []
        for t1 in _chart_grid(-1.2, 0.6, n):
            for w1 in _chart_grid(-0.25 * c * c, 1.25 * c * c, n):
                d = eval_chart_keps((t1, w1, r), c)
                rows.append((t1, w1, r, d[0], d[1]))
        table = csv_table("T1,W1,r1,dT1,dW1", rows)
    else:
        q = math.sqrt(2.0 / 3.0)
        rows = []
        for e2 in _chart_grid(0.0, 1.5 * math.sqrt(2.0) / c, n):
            for t2 in _chart_grid(-2.0 * q, 2.0 * q, n):
                d = eval_chart_kw((r, e2, t2), c)
                rows.append((r, e2, t2, d[0], d[1], d[2]))
        table = csv_table("r2,eps2,T2,dr2,deps2,dT2", rows)
    _emit(table, p["out"])
    return 0


def _snapshot_path(base: str, index: int, total: int) -> str:
    if total == 1:
        return base
    stem, ext = os.path.splitext(base)
    return f"{stem}_{index}{ext or '.csv'}"


def _run_pde(p: dict) -> int:
    grid = Grid(0.0, p["L"], int(round(p["L"] / p["dx"])))
    snap_times = tuple(p["snap_times"])
    if p["snapshots"] is not None and not snap_times:
        snap_times = (p["tmax"],)
    track = measure_speed(
        p["rho"], grid, p["tmax"], p["out_every"], snapshot_times=snap_times
    )
    doc = {
        "subcommand": "pde",
        "rho": p["rho"],
        "speed": track.speed,
        "ratio": track.speed / p["rho"] ** (1.0 / 3.0),
        "fit_residual": track.residual,
        "t_range": list(track.t_range),
        "outputs": len(track.times),
        "config": _config_doc(p),
    }
    sys.stdout.write(dumps(doc))
    if p["out"] is not None:
        _emit(
            csv_table("time,front_x", list(zip(track.times, track.positions))),
            p["out"],
        )
    if p["snapshots"] is not None:
        total = len(track.snapshots)
        for i, (t, x, T, u) in enumerate(track.snapshots):
            rows = [(float(xv), float(tv), float(uv)) for xv, tv, uv in zip(x, T, u)]
            _emit(csv_table("x,T,u", rows), _snapshot_path(p["snapshots"], i, total))
    return 0


_RUNNERS = {
    "speed": _run_speed,
    "sweep": _run_sweep,
    "shoot": _run_shoot,
    "profile": _run_profile,
    "phase": _run_phase,
    "equilibria": _run_equilibria,
    "blowup": _run_blowup,
    "pde": _run_pde,
}


def run(config: RunConfig) -> int:
    """Dispatch a parsed config; artifact writing happens here."""
    return _RUNNERS[config.subcommand](config.params)


def version_string() -> str:
    return (
        f"rdafront {__version__} "
        f"[{BACKEND} kernels, numpy {np.__version__}, "
        f"python {sys.version.split()[0]}]"
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    if args and args[0] == "--version":
        print(version_string())
        return 0
    try:
        cfg = parse(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 64
    try:
        return run(cfg)
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ShootError, SingularLineError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 64
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 64
    except BrokenPipeError:
        # reader went away mid-stream (e.g. piping into head); not our error
        try:
            sys.stdout.close()
        except OSError:
            pass
        return 0
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
