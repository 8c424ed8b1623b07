"""Equity floors layered on the base schedule."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bailrule import (
    EXTRA_KINK,
    SC_DOMINATED,
    SC_PARALLEL,
    CustomFloor,
    MechanismParams,
    ParallelFloor,
    ParameterError,
    apply_equity_floor,
    cutoffs,
    tlc_policy_linear,
)

FLOOR_P = MechanismParams(omega_b=1, c=1, omega_T=0.5, T=0, b_bar=10, theta_bar=2)


def test_parallel_floor_worked_values():
    val, label = apply_equity_floor(0.45, ParallelFloor(0.1), FLOOR_P)
    assert val == pytest.approx(0.05)
    assert label == SC_PARALLEL
    # lifting the floor by a is the same schedule as cutting omega_T by c*a
    from dataclasses import replace
    tilde = replace(FLOOR_P, omega_T=FLOOR_P.omega_T - FLOOR_P.c * 0.1)
    assert tilde.omega_T == pytest.approx(0.4)
    assert cutoffs(tilde).theta_lo == pytest.approx(0.4)
    grid = np.linspace(0.4, 2.0, 400)  # on/above the shifted activation point
    floored = apply_equity_floor(grid, ParallelFloor(0.1), FLOOR_P)[0]
    assert floored == pytest.approx(tlc_policy_linear(grid, tilde))


def test_zero_custom_floor_never_binds():
    floor = CustomFloor((0.0, 2.0), (0.0, 0.0))
    grid = np.linspace(0, 2, 301)
    vals, label = apply_equity_floor(grid, floor, FLOOR_P)
    assert label == SC_DOMINATED
    assert np.array_equal(vals, tlc_policy_linear(grid, FLOOR_P))


def test_crossing_floor_is_extra_kink_and_matches_pointwise_oracle():
    p = MechanismParams(omega_b=1, c=1, omega_T=0.5, T=0, b_bar=1.0, theta_bar=2)
    floor = CustomFloor((0.0, 0.9, 2.0), (0.3, 0.3, 0.3))  # flat, crosses interior line
    grid = np.linspace(cutoffs(p).theta_lo, 1.5, 1000)
    vals, label = apply_equity_floor(grid, floor, p)
    assert label == EXTRA_KINK
    b_int = (p.omega_b * grid - p.omega_T) / p.c
    oracle = np.clip(np.maximum(0.3, b_int), 0.0, p.b_bar)
    assert vals == pytest.approx(oracle)


def test_floor_only_on_admissible_region():
    p = MechanismParams(omega_b=1, c=1, omega_T=0.5, T=0.6, b_bar=10, theta_bar=2)
    vals, _ = apply_equity_floor(np.array([0.3, 0.59]), ParallelFloor(0.1), p)
    assert np.array_equal(vals, [0.0, 0.0])  # below T nothing pays out


def test_negative_a_never_binds():
    grid = np.linspace(0, 2, 201)
    vals, label = apply_equity_floor(grid, ParallelFloor(-0.2), FLOOR_P)
    assert np.array_equal(vals, tlc_policy_linear(grid, FLOOR_P))
    assert label in (SC_PARALLEL, SC_DOMINATED)


def test_custom_floor_validation():
    with pytest.raises(ParameterError):
        CustomFloor((0.0, 1.0), (0.5, 0.2))  # decreasing values
    with pytest.raises(ParameterError):
        CustomFloor((1.0, 0.5), (0.1, 0.2))  # knots not increasing
    with pytest.raises(ParameterError):
        CustomFloor((0.0, 1.0), (-0.1, 0.2))  # negative floor


def test_floor_above_cap_rejected():
    p = MechanismParams(omega_b=1, c=1, omega_T=0.5, T=0, b_bar=0.4, theta_bar=2)
    with pytest.raises(ParameterError):
        apply_equity_floor(1.0, CustomFloor((0.0, 2.0), (0.0, 0.9)), p)


def test_parallel_infeasible_becomes_extra_kink():
    # a large enough that a + s*theta pokes above the cap inside the region
    p = MechanismParams(omega_b=1, c=1, omega_T=0.5, T=0, b_bar=0.6, theta_bar=2)
    _, label = apply_equity_floor(0.8, ParallelFloor(0.5), p)
    assert label == EXTRA_KINK


@given(st.floats(0.0, 0.3), st.floats(0.05, 3.0), st.floats(0.05, 3.0),
       st.floats(0.0, 2.0))
@settings(max_examples=150, deadline=None)
def test_sc_parallel_slope_preserved(a, omega_b, c, omega_T):
    p = MechanismParams(omega_b=omega_b, c=c, omega_T=omega_T, T=0,
                        b_bar=np.inf, theta_bar=50.0)
    floor = ParallelFloor(a)
    lo = cutoffs(p).theta_lo
    grid = np.linspace(lo + 0.1, lo + 1.1, 64)
    vals, label = apply_equity_floor(grid, floor, p)
    assert label == SC_PARALLEL
    slopes = np.diff(vals) / np.diff(grid)
    assert np.all(np.abs(slopes - omega_b / c) <= 1e-9)


@given(st.floats(0.0, 1.8), st.lists(st.floats(0.0, 0.5), min_size=2, max_size=5))
@settings(max_examples=150, deadline=None)
def test_floored_value_matches_max_clip_oracle(theta, raw_vals):
    p = MechanismParams(omega_b=1, c=1, omega_T=0.5, T=0, b_bar=1.0, theta_bar=2)
    vals = tuple(np.minimum.accumulate(sorted(raw_vals, reverse=True))[::-1])
    vals = tuple(sorted(vals))
    knots = tuple(np.linspace(0.1, 1.9, len(vals)))
    floor = CustomFloor(knots, vals)
    got, _ = apply_equity_floor(theta, floor, p)
    b_int = max((p.omega_b * theta - p.omega_T) / p.c, 0.0)
    want = min(max(np.interp(theta, knots, vals), b_int), p.b_bar)
    assert got == pytest.approx(want, abs=1e-12)
