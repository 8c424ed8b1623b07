"""Recovering a threshold-linear-cap signature from payout episodes.

The regression model is a two-knot hinge spline with one shared slope,

    b_i = s * (theta_i - theta1)_+ - s * (theta_i - theta2)_+ + eps_i,
    theta2 >= theta1 >= T,   s >= 0,

whose fitted shape is exactly a TLC schedule: zero, then linear with slope s,
then flat at s * (theta2 - theta1).  ``fit_tlc`` profiles the slope out (it
has a closed form per knot pair) and searches knot pairs exhaustively over a
candidate set; the search is O(K^2) with O(1) per pair via suffix sums.

Downstream: ``classify_episodes`` labels each episode zero / interior / cap /
override against a fit; ``detect_override_shift`` refits with a cap-region
dummy to surface systematic cap-breaking; ``attribute_shift`` decomposes knot
movement between two fitted regimes into implied political-cost and cap
changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EstimationError, ParameterError
from .policy import MechanismParams, cutoffs, tlc_policy_linear
from .voting import bundle_check

__all__ = [
    "Episode",
    "TlcFit",
    "OverrideReport",
    "ShiftAttribution",
    "fit_tlc",
    "predict",
    "default_tolerance",
    "classify_episodes",
    "classify_against_schedule",
    "schedule_as_fit",
    "detect_override_shift",
    "attribute_shift",
]

REGIME_ZERO = "zero"
REGIME_INTERIOR = "interior"
REGIME_CAP = "cap"
REGIME_OVERRIDE = "override"


@dataclass(frozen=True)
class Episode:
    """One observed bailout decision: shock proxy, realized payout, optional label."""

    theta: float
    b: float
    regime: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "b", float(self.b))
        if not math.isfinite(self.theta):
            raise ParameterError(f"theta must be finite, got {self.theta}")
        if not (math.isfinite(self.b) and self.b >= 0):
            raise ParameterError(f"b must be finite and >= 0, got {self.b}")


@dataclass(frozen=True)
class TlcFit:
    """Fitted two-knot hinge spline.

    cap_level is the implied plateau s * (theta2 - theta1).  grid_resolution
    is the uniform knot-grid step used in the search; fitted knots are only
    trustworthy to roughly that scale.  pred_tol_floor bounds the prediction
    slack attributable to knot quantization (slope times the local candidate
    spacing around each chosen knot) — classification tolerances should not
    go below it.  ``structural`` records the caller's declaration that the
    payouts come from a linear-benefit rule, in which case s estimates the
    benefit/cost ratio; under a general concave benefit the interior segment
    is only a monotone approximation and s has no structural reading.
    """

    s: float
    theta1: float
    theta2: float
    sse: float
    n_obs: int
    t_admissible: float
    grid_resolution: float
    residual_se: float = 0.0
    pred_tol_floor: float = 0.0
    degenerate: bool = False
    no_interior: bool = False
    structural: bool = True
    method: str = "profile_ls"

    @property
    def cap_level(self) -> float:
        return self.s * (self.theta2 - self.theta1)


def _as_arrays(data: Sequence[Episode]) -> tuple[np.ndarray, np.ndarray]:
    theta = np.array([e.theta for e in data], dtype=float)
    b = np.array([e.b for e in data], dtype=float)
    return theta, b


def _candidate_knots(theta: np.ndarray, t_admissible: float, knot_grid: int) -> np.ndarray:
    """Uniform grid joined with observed shocks and their midpoints.

    The profiled objective is piecewise smooth with kinks at data points, so
    candidates must straddle every data point; midpoints guarantee that.
    """
    top = float(theta.max())
    if top <= t_admissible:
        return np.array([t_admissible])
    grid = np.linspace(t_admissible, top, knot_grid)
    obs = np.unique(theta)
    mids = 0.5 * (obs[:-1] + obs[1:])
    cand = np.concatenate([grid, obs, mids])
    cand = cand[(cand >= t_admissible) & (cand <= top)]
    return np.unique(cand)


def predict(theta, fit: TlcFit):
    """Fitted schedule at ``theta``: clip(s * (clip(theta,t1,t2) - t1), >= 0)."""
    arr = np.asarray(theta, dtype=float)
    x = np.clip(arr, fit.theta1, fit.theta2) - fit.theta1
    out = np.maximum(fit.s * x, 0.0)
    return float(out) if arr.ndim == 0 else out


def fit_tlc(
    data: Sequence[Episode],
    t_admissible: float,
    knot_grid: int = 201,
    linear_benefit: bool = True,
    method: str = "profile_ls",
) -> TlcFit:
    """Profile least squares over knot pairs with closed-form slope.

    For fixed knots the regressor is x_i = (theta_i - t1)_+ - (theta_i - t2)_+
    and the nonnegative LS slope is max(0, <x,b>/<x,x>); minimizing SSE over
    pairs is equivalent to maximizing <x,b>^2/<x,x>, which suffix sums give
    in O(1) per pair.  Ties break to the smallest theta1, then theta2.
    Fitted values are clipped at zero after estimation (vacuous here since
    s and x are nonnegative, but part of the contract).

    Set ``linear_benefit=False`` when the payouts are believed to come from a
    general concave benefit; the fit is unchanged but flagged non-structural.
    """
    if method != "profile_ls":
        raise NotImplementedError(
            f"method {method!r} is reserved but not implemented; use 'profile_ls'"
        )
    if len(data) < 4:
        raise EstimationError(f"need at least 4 episodes, got {len(data)}")
    theta, b = _as_arrays(data)
    if np.unique(theta).size < 2:
        raise EstimationError("all shocks identical; knots are not identified")
    t_admissible = float(t_admissible)
    if knot_grid < 2:
        raise ParameterError(f"knot_grid must be >= 2, got {knot_grid}")

    cand = _candidate_knots(theta, t_admissible, knot_grid)
    span = max(float(theta.max()) - t_admissible, 0.0)
    resolution = span / (knot_grid - 1) if span > 0 else 0.0

    order = np.argsort(theta, kind="stable")
    ts, bs = theta[order], b[order]

    def suffix(values: np.ndarray) -> np.ndarray:
        return np.concatenate([np.cumsum(values[::-1])[::-1], [0.0]])

    idx = np.searchsorted(ts, cand, side="right")
    s0 = suffix(np.ones_like(ts))[idx]
    s_th = suffix(ts)[idx]
    s_th2 = suffix(ts * ts)[idx]
    s_b = suffix(bs)[idx]
    s_bth = suffix(bs * ts)[idx]

    p = s_bth - cand * s_b                                # sum (theta-t)_+ b
    q = s_th2 - 2.0 * cand * s_th + cand * cand * s0      # sum (theta-t)_+^2

    q_floor = 1e-12 * max(float(q[0]), 1.0)
    best_gain = 0.0
    best = (0, 0)
    for j in range(cand.size):
        tj = cand[j]
        a_row = p[j] - p[j:]
        r_row = s_th2[j:] - (tj + cand[j:]) * s_th[j:] + tj * cand[j:] * s0[j:]
        q_row = q[j] + q[j:] - 2.0 * r_row
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = np.where((q_row > q_floor) & (a_row > 0.0), a_row * a_row / q_row, 0.0)
        k = int(np.argmax(gain))
        if gain[k] > best_gain:
            best_gain = float(gain[k])
            best = (j, j + k)

    j, k = best
    t1, t2 = float(cand[j]), float(cand[k])

    # Recompute the winning pair directly: the ranking form sum(b^2) - gain
    # loses all significance once the fit is near-perfect.
    x = np.clip(theta, t1, t2) - t1
    xx = float(x @ x)
    slope = max(0.0, float(x @ b) / xx) if xx > q_floor else 0.0
    fitted = np.maximum(slope * x, 0.0)
    resid = b - fitted
    sse = float(resid @ resid)

    all_zero = bool(np.all(b == 0.0))
    if best_gain == 0.0:
        t1 = t2 = float(cand[0])
        slope, fitted = 0.0, np.zeros_like(b)
        sse = float(b @ b)

    def local_gap(i: int) -> float:
        gaps = []
        if i > 0:
            gaps.append(cand[i] - cand[i - 1])
        if i + 1 < cand.size:
            gaps.append(cand[i + 1] - cand[i])
        return float(max(gaps)) if gaps else 0.0

    n = len(data)
    residual_se = math.sqrt(sse / max(n - 3, 1))
    pred_floor = slope * (local_gap(j) + local_gap(k))
    return TlcFit(
        s=slope,
        theta1=t1,
        theta2=t2,
        sse=sse,
        n_obs=n,
        t_admissible=t_admissible,
        grid_resolution=resolution,
        residual_se=residual_se,
        pred_tol_floor=pred_floor,
        degenerate=all_zero,
        no_interior=(t1 == t2),
        structural=linear_benefit,
    )


def default_tolerance(fit: TlcFit) -> float:
    """Compliance tolerance: twice the residual scale, floored by knot
    quantization slack so perfectly compliant data never reads as override."""
    return max(2.0 * fit.residual_se, fit.pred_tol_floor, 1e-9)


def classify_episodes(
    data: Sequence[Episode], fit: TlcFit, tol: float | None = None
) -> list[str]:
    """Label each episode zero / interior / cap / override against a fit.

    zero: below theta1 with no payout; interior: on the fitted line within
    tol; cap: above theta2 on the plateau within tol; override: anything
    else.
    """
    if tol is None:
        tol = default_tolerance(fit)
    if tol < 0:
        raise ParameterError(f"tol must be >= 0, got {tol}")
    labels = []
    for e in data:
        if e.theta < fit.theta1:
            ok = abs(e.b) <= tol
            labels.append(REGIME_ZERO if ok else REGIME_OVERRIDE)
        elif e.theta <= fit.theta2:
            ok = abs(e.b - fit.s * (e.theta - fit.theta1)) <= tol
            labels.append(REGIME_INTERIOR if ok else REGIME_OVERRIDE)
        else:
            ok = abs(e.b - fit.cap_level) <= tol
            labels.append(REGIME_CAP if ok else REGIME_OVERRIDE)
    return labels


def classify_against_schedule(
    data: Sequence[Episode], params: MechanismParams, tol: float
) -> list[str]:
    """Label episodes against a published schedule rather than a fit.

    This is the compliance half of an audit: the published parameters are the
    commitment, so deviations are judged against them, not against a curve
    re-estimated from possibly contaminated data (a refit absorbs systematic
    overrides into its own knots).  Regions come from the schedule's cutoffs;
    note a refit-based classification via ``classify_episodes`` cannot
    represent the payout jump at T when T pins the lower cutoff, this can.
    """
    if tol < 0:
        raise ParameterError(f"tol must be >= 0, got {tol}")
    cut = cutoffs(params)
    labels = []
    for e in data:
        target = tlc_policy_linear(min(max(e.theta, 0.0), params.theta_bar), params)
        ok = abs(e.b - target) <= tol
        if not ok:
            labels.append(REGIME_OVERRIDE)
        elif e.theta < cut.theta_lo:
            labels.append(REGIME_ZERO)
        elif e.theta <= cut.theta_hi:
            labels.append(REGIME_INTERIOR)
        else:
            labels.append(REGIME_CAP)
    return labels


def schedule_as_fit(params: MechanismParams, n_obs: int = 0) -> TlcFit:
    """A published schedule expressed as a TlcFit (for the dummy refit).

    Only exact when the cost branch pins the lower cutoff (the hinge spline
    is continuous; a T-pinned schedule jumps at T).  grid_resolution is 0:
    card knots carry no quantization slack.
    """
    cut = cutoffs(params)
    return TlcFit(
        s=params.interior_slope,
        theta1=cut.theta_lo,
        theta2=cut.theta_hi,
        sse=0.0,
        n_obs=n_obs,
        t_admissible=params.T,
        grid_resolution=0.0,
        residual_se=0.0,
        pred_tol_floor=0.0,
    )


@dataclass(frozen=True)
class OverrideReport:
    """Cap-region dummy refit holding the fitted knots fixed.

    ``identified`` is False when fewer than 2 episodes sit above theta2 (the
    dummy is then meaningless and no flag is raised).  ``dummy`` is the
    estimated uniform cap-region shift; ``dummy_over_rse`` scales it by the
    refit's residual standard error; ``slope_moved`` flags an interior-slope
    change beyond 5% relative, which a pure cap override should not cause.
    """

    identified: bool
    n_cap_obs: int
    dummy: float | None = None
    dummy_over_rse: float | None = None
    slope_refit: float | None = None
    slope_moved: bool | None = None


def detect_override_shift(data: Sequence[Episode], fit: TlcFit) -> OverrideReport:
    """Refit with an additive cap-region dummy at the fitted knots.

    Design: b ~ s * x + d * 1[theta > theta2].  A systematic override above
    the cap loads on d and, because the knots are held fixed, should leave
    the slope within 5% of the original fit.
    """
    theta, b = _as_arrays(data)
    cap_mask = theta > fit.theta2
    n_cap = int(cap_mask.sum())
    if n_cap < 2:
        return OverrideReport(identified=False, n_cap_obs=n_cap)
    x = np.clip(theta, fit.theta1, fit.theta2) - fit.theta1
    design = np.column_stack([x, cap_mask.astype(float)])
    coef, *_ = np.linalg.lstsq(design, b, rcond=None)
    slope_new, dummy = float(coef[0]), float(coef[1])
    resid = b - design @ coef
    dof = max(len(data) - 2, 1)
    rse = math.sqrt(float(resid @ resid) / dof)
    if fit.s > 0:
        moved = abs(slope_new - fit.s) > 0.05 * fit.s
    else:
        moved = abs(slope_new) > 1e-9
    return OverrideReport(
        identified=True,
        n_cap_obs=n_cap,
        dummy=dummy,
        dummy_over_rse=(abs(dummy) / rse if rse > 0 else math.inf if dummy else 0.0),
        slope_refit=slope_new,
        slope_moved=moved,
    )


@dataclass(frozen=True)
class ShiftAttribution:
    """Decomposition of knot movement between two fitted regimes.

    delta_theta2 = implied_domega_T_over_omega_b + implied_c_db_bar_over_omega_b
    by construction.  When theta1 is pinned at the admissibility threshold in
    either fit, the political-cost component is not identified from theta1;
    it is reported as 0 with ``omega_T_identified`` False and the whole
    theta2 movement is attributed to the cap.
    """

    delta_theta1: float
    delta_theta2: float
    implied_delta_omega_T: float
    implied_delta_b_bar: float
    implied_domega_T_over_omega_b: float
    implied_c_db_bar_over_omega_b: float
    omega_T_identified: bool
    bundle_consistent: bool | None
    announced_match: bool | None


def attribute_shift(
    fit_before: TlcFit,
    fit_after: TlcFit,
    omega_b: float,
    c: float,
    announced: tuple[float, float] | None = None,
) -> ShiftAttribution:
    """Map (delta theta1, delta theta2) to implied (delta omega_T, delta b_bar).

    Lower-knot movement prices the political-cost change (omega_b per unit);
    what upper-knot movement that change does not explain is priced as a cap
    change.  ``announced`` is an optional (delta omega_T, delta b_bar) claim
    to check the attribution against, at a tolerance set by the fits' knot
    resolutions.
    """
    omega_b, c = float(omega_b), float(c)
    if omega_b <= 0 or c <= 0:
        raise ParameterError("omega_b and c must be > 0")
    d1 = fit_after.theta1 - fit_before.theta1
    d2 = fit_after.theta2 - fit_before.theta2

    def pinned(fit: TlcFit) -> bool:
        return abs(fit.theta1 - fit.t_admissible) <= max(fit.grid_resolution, 1e-12)

    identified = not (pinned(fit_before) or pinned(fit_after))
    d_omega_T = omega_b * d1 if identified else 0.0
    d_b_bar = (omega_b * d2 - d_omega_T) / c

    bundle = bundle_check((0.0, 0.0), (d_omega_T, d_b_bar)) if identified else None

    match = None
    if announced is not None:
        ann_omega, ann_cap = float(announced[0]), float(announced[1])
        knot_tol = fit_before.grid_resolution + fit_after.grid_resolution
        tol_omega = omega_b * knot_tol
        tol_cap = 2.0 * omega_b * knot_tol / c
        match = abs(d_b_bar - ann_cap) <= max(tol_cap, 1e-9)
        if identified:
            match = match and abs(d_omega_T - ann_omega) <= max(tol_omega, 1e-9)

    return ShiftAttribution(
        delta_theta1=d1,
        delta_theta2=d2,
        implied_delta_omega_T=d_omega_T,
        implied_delta_b_bar=d_b_bar,
        implied_domega_T_over_omega_b=d_omega_T / omega_b,
        implied_c_db_bar_over_omega_b=c * d_b_bar / omega_b,
        omega_T_identified=identified,
        bundle_consistent=bundle,
        announced_match=match,
    )
