"""Equity floors layered on top of a transfer schedule.

A floor b_min(theta) forces payouts up to at least the floor wherever the
floor exceeds the unconstrained interior candidate; the result is still
clipped into [0, b_bar].  Two shapes are supported:

* ``ParallelFloor(a)`` — the interior line displaced upward by ``a``.  The
  floored schedule is again threshold-linear-cap with the political cost
  effectively reduced to omega_T - c * a, so both cutoffs slide left and the
  interior slope is preserved.
* ``CustomFloor`` — any piecewise-linear weakly increasing function, given by
  knots; values extend constant beyond the outermost knots.

``classify_floor`` reports which of those structural cases holds:
``SC-Parallel`` (schedule remains two-cutoff with an effective political
cost), ``SC-Dominated`` (floor never binds; schedule unchanged), or
``ExtraKink`` (the floor crosses the interior line and adds a kink, which
will defeat a two-cutoff audit signature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .policy import MechanismParams, cutoffs

__all__ = [
    "ParallelFloor",
    "CustomFloor",
    "EquityFloor",
    "apply_equity_floor",
    "classify_floor",
    "SC_PARALLEL",
    "SC_DOMINATED",
    "EXTRA_KINK",
]

SC_PARALLEL = "SC-Parallel"
SC_DOMINATED = "SC-Dominated"
EXTRA_KINK = "ExtraKink"

# Dominance is decided on this many interior grid points plus all segment
# endpoints; floors are piecewise-linear so endpoints alone would suffice,
# the grid is a safety net.
_CLASSIFY_GRID = 1024


@dataclass(frozen=True)
class ParallelFloor:
    """Floor running parallel to the interior line, ``a`` above it.

    Equivalent to cutting the political shadow cost by c * a; ``a`` may be
    negative, in which case the floor sits below the line and never binds.
    """

    a: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", float(self.a))
        if math.isnan(self.a) or math.isinf(self.a):
            raise ParameterError(f"floor intercept must be finite, got {self.a}")

    def values(self, theta: np.ndarray, params: MechanismParams) -> np.ndarray:
        return (params.omega_b * theta - params.omega_T) / params.c + self.a


@dataclass(frozen=True)
class CustomFloor:
    """Piecewise-linear weakly increasing floor given by knots.

    ``theta_knots`` strictly increasing, ``b_values`` weakly increasing and
    non-negative.  Outside the knot span the floor extends at its edge value.
    """

    theta_knots: tuple
    b_values: tuple

    def __post_init__(self) -> None:
        tk = tuple(float(t) for t in self.theta_knots)
        bv = tuple(float(b) for b in self.b_values)
        object.__setattr__(self, "theta_knots", tk)
        object.__setattr__(self, "b_values", bv)
        if len(tk) != len(bv) or len(tk) < 1:
            raise ParameterError("floor needs matching, non-empty knot and value lists")
        if any(t2 <= t1 for t1, t2 in zip(tk, tk[1:])):
            raise ParameterError("floor knots must be strictly increasing")
        if any(b2 < b1 for b1, b2 in zip(bv, bv[1:])):
            raise ParameterError("floor values must be weakly increasing")
        if bv[0] < 0:
            raise ParameterError("floor values must be non-negative")

    def values(self, theta: np.ndarray, params: MechanismParams) -> np.ndarray:
        return np.interp(theta, self.theta_knots, self.b_values)


EquityFloor = ParallelFloor | CustomFloor


def _floor_region(params: MechanismParams) -> tuple[float, float]:
    """Interior region on which floor behavior is judged, truncated to support."""
    cut = cutoffs(params)
    lo = min(cut.theta_lo, params.theta_bar)
    hi = min(cut.theta_hi, params.theta_bar)
    return lo, hi


def _check_floor_bounds(floor: EquityFloor, params: MechanismParams) -> None:
    if isinstance(floor, CustomFloor) and max(floor.b_values) > params.b_bar:
        raise ParameterError(
            f"floor demands {max(floor.b_values)} above the consent cap {params.b_bar}"
        )


def classify_floor(floor: EquityFloor, params: MechanismParams) -> str:
    """Structural classification of a floored schedule.

    SC-Parallel: parallel floor whose line stays within [0, b_bar] across the
    interior region, so the schedule is a clean two-cutoff rule with
    effective political cost omega_T - c * a.  SC-Dominated: floor is at or
    below the interior candidate across the region, so the schedule is
    bitwise unchanged.  ExtraKink: anything else (floor crosses the line).
    """
    _check_floor_bounds(floor, params)
    lo, hi = _floor_region(params)
    grid = np.linspace(lo, hi, _CLASSIFY_GRID)
    if isinstance(floor, CustomFloor):
        interior_knots = [t for t in floor.theta_knots if lo < t < hi]
        grid = np.unique(np.concatenate([grid, np.asarray(interior_knots, dtype=float)]))

    if isinstance(floor, ParallelFloor):
        fvals = floor.values(np.array([lo, hi]), params)
        # tolerate rounding at theta_lo, where the line passes exactly 0
        if fvals.min() >= -1e-12 and fvals.max() <= params.b_bar + 1e-12:
            return SC_PARALLEL

    b_int = (params.omega_b * grid - params.omega_T) / params.c
    if np.all(floor.values(grid, params) <= b_int + 1e-12):
        return SC_DOMINATED
    return EXTRA_KINK


def apply_equity_floor(theta, floor: EquityFloor, params: MechanismParams):
    """Floored transfer at ``theta`` plus the structural classification.

    Pointwise: clip(max(b_min(theta), interior candidate), 0, b_bar) for
    admissible shocks, zero below the threshold T.  Elementwise over arrays;
    scalar in, scalar out.  Returns ``(value, classification)``.
    """
    _check_floor_bounds(floor, params)
    arr = np.asarray(theta, dtype=float)
    if np.any(arr < 0) or np.any(arr > params.theta_bar) or np.any(np.isnan(arr)):
        raise ParameterError(f"theta must lie in [0, theta_bar]=[0, {params.theta_bar}]")
    b_int = (params.omega_b * arr - params.omega_T) / params.c
    raised = np.maximum(floor.values(arr, params), b_int)
    out = np.where(arr < params.T, 0.0, np.clip(raised, 0.0, params.b_bar))
    label = classify_floor(floor, params)
    if np.isscalar(theta) or arr.ndim == 0:
        return float(out), label
    return out, label
