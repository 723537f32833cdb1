"""Closed-form limit objects: branch graphs, the selected speed, and the
analytic crossing derivative."""

import math

import pytest
from hypothesis import given, strategies as st

from rdafront.singular_limit import (
    K_ORIGIN_FACTOR,
    K_REST_STATE,
    c_star_0,
    cbrt,
    curve_residual,
    dphi0_dc,
    g_s,
    g_u,
    phi0,
)


def test_cbrt_real_branch():
    assert cbrt(8.0) == pytest.approx(2.0, abs=1e-15)
    assert cbrt(-8.0) == pytest.approx(-2.0, abs=1e-15)
    assert cbrt(0.0) == 0.0


@given(st.floats(min_value=-50.0, max_value=50.0))
def test_cbrt_cubes_back(x):
    assert cbrt(x) ** 3 == pytest.approx(x, rel=1e-12, abs=1e-12)


def test_selected_speed_is_cube_root_of_three_halves():
    c = c_star_0()
    assert c == pytest.approx(1.1447142425533319, abs=1e-15)
    assert c**3 == pytest.approx(1.5, abs=1e-14)


@given(
    st.floats(min_value=0.8, max_value=1.6),
    st.floats(min_value=1e-6, max_value=1.0),
)
def test_gs_sits_on_origin_level(c, T):
    # the stable branch graph solves the level equation through the origin
    k = K_ORIGIN_FACTOR * c**3
    assert curve_residual(T, g_s(c, T), c, k) == pytest.approx(0.0, abs=1e-12)


@given(
    st.floats(min_value=0.8, max_value=1.6),
    st.floats(min_value=1e-6, max_value=1.0 - 1e-9),
)
def test_gu_sits_on_rest_state_level(c, T):
    assert curve_residual(T, g_u(c, T), c, K_REST_STATE) == pytest.approx(
        0.0, abs=1e-12
    )


def test_branch_graphs_end_below_the_singular_line():
    c = 1.2
    assert g_s(c, 1e-9) == pytest.approx(0.0, abs=1e-6)
    assert g_u(c, 1.0 - 1e-12) == pytest.approx(c, abs=1e-3)
    for T in (0.1, 0.5, 0.9):
        assert g_s(c, T) < c
        assert g_u(c, T) < c


def test_phi0_signs_select_the_speed():
    c = c_star_0()
    assert phi0(c) == pytest.approx(0.0, abs=1e-15)
    # crossing is transverse: opposite signs on either side
    assert phi0(c - 0.05) > 0.0
    assert phi0(c + 0.05) < 0.0


def test_phi0_matches_graph_difference():
    for c in (1.0, 1.1447142425533319, 1.3):
        assert phi0(c) == pytest.approx(g_s(c, 0.5) - g_u(c, 0.5), abs=1e-14)


def test_crossing_derivative_analytic_value():
    c = c_star_0()
    # at the selected speed the derivative collapses to -4^(2/3)
    assert dphi0_dc(c, 0.5) == pytest.approx(-(4.0 ** (2.0 / 3.0)), abs=1e-14)


def test_crossing_derivative_matches_finite_difference():
    c = c_star_0()
    h = 1e-6
    fd = (phi0(c + h) - phi0(c - h)) / (2.0 * h)
    assert fd == pytest.approx(dphi0_dc(c, 0.5), abs=1e-8)
