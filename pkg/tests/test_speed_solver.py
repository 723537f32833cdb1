"""Speed selection, the epsilon sweep, and front-profile diagnostics."""

import math

import pytest

from rdafront.dynsys import Params
from rdafront.rootfind import BracketError
from rdafront.singular_limit import c_star_0
from rdafront.speed_solver import (
    ctilde_from,
    front_decay_reference,
    front_profile,
    solve_speed,
    sweep,
)

_CSTAR = c_star_0()


def test_limit_speed_to_tolerance():
    res = solve_speed(0.0)
    assert abs(res.c_star - _CSTAR) < 1e-10
    assert res.rho is None and res.ctilde_star is None
    assert abs(res.residual) < 1e-8


def test_positive_eps_scalings():
    res = solve_speed(0.1)
    assert res.rho == pytest.approx(1e3, rel=1e-12)
    assert res.ctilde_star == pytest.approx(res.c_star / 0.1, rel=1e-12)
    # pushed front: strictly above the limit speed
    assert res.c_star > _CSTAR


def test_scaling_identity_is_exact():
    res = solve_speed(0.2)
    rho, ctilde = ctilde_from(res)
    assert ctilde / rho ** (1.0 / 3.0) == pytest.approx(res.c_star, rel=1e-13)


def test_ctilde_rejects_limit_result():
    with pytest.raises(ValueError):
        ctilde_from(solve_speed(0.0))


def test_bad_brackets():
    with pytest.raises(ValueError):
        solve_speed(0.1, bracket=(1.8, 1.0))
    with pytest.raises(BracketError):
        solve_speed(0.1, bracket=(1.5, 1.8))


def test_negative_eps_rejected():
    with pytest.raises(ValueError):
        solve_speed(-0.1)


def test_sweep_orders_and_extrapolates():
    summ = sweep([0.2, 0.1])
    assert len(summ.results) == 2
    assert not summ.failures
    assert summ.results[0].eps == 0.2
    errs = [abs(r.c_star - _CSTAR) for r in summ.results]
    assert errs[1] < errs[0]
    assert summ.limit_reference == pytest.approx(_CSTAR, abs=1e-14)
    assert summ.extrapolated is not None


def test_sweep_input_validation():
    with pytest.raises(ValueError):
        sweep([])
    with pytest.raises(ValueError):
        sweep([0.1, 0.2])  # ascending
    with pytest.raises(ValueError):
        sweep([0.2, -0.1])


def test_sweep_records_failures_and_continues():
    # middle entry cannot bracket a root; others succeed
    summ = sweep([0.2, 0.1], bracket=(1.0, 1.8))
    assert not summ.failures
    bad = sweep([0.2], bracket=(1.7, 1.8))
    assert bad.failures and not bad.results


def test_front_profile_monotone_with_expected_tail():
    eps = 0.1
    c = solve_speed(eps).c_star
    prof = front_profile(eps, c, (0.0, 60.0))
    assert prof.monotone
    xs = [s[0] for s in prof.samples]
    assert all(b > a for a, b in zip(xs, xs[1:]))
    ref = front_decay_reference(Params(c=c, eps=eps))
    assert prof.decay_rate == pytest.approx(ref, rel=0.05)


def test_decay_reference_closed_form():
    c, eps = 1.15, 0.1
    ref = front_decay_reference(Params(c=c, eps=eps))
    strong = 0.5 * (c + math.sqrt(c * c - 4.0 * eps * eps))
    assert ref == pytest.approx(strong, abs=1e-7)


def test_profile_needs_positive_eps_and_span():
    with pytest.raises(ValueError):
        front_profile(0.0, _CSTAR, (0.0, 60.0))
    with pytest.raises(ValueError):
        front_profile(0.1, 1.15, (10.0, 10.0))
