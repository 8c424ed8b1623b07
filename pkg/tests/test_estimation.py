"""Two-knot hinge-spline estimation, classification, overrides, attribution."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bailrule import (
    Episode,
    EstimationError,
    MechanismParams,
    TlcFit,
    attribute_shift,
    classify_against_schedule,
    classify_episodes,
    cutoffs,
    detect_override_shift,
    fit_tlc,
    predict,
    schedule_as_fit,
    tlc_policy_linear,
)


def hinge_eval(theta, s, t1, t2):
    th = np.asarray(theta, dtype=float)
    return s * np.maximum(th - t1, 0.0) - s * np.maximum(th - t2, 0.0)


def hinge_sse(data, s, t1, t2):
    th = np.array([e.theta for e in data])
    b = np.array([e.b for e in data])
    resid = b - np.clip(hinge_eval(th, s, t1, t2), 0.0, None)
    return float(resid @ resid)


def profile_slope(data, t1, t2):
    # closed-form nonnegative LS slope for fixed knots, written independently
    th = np.array([e.theta for e in data])
    b = np.array([e.b for e in data])
    x = np.maximum(th - t1, 0.0) - np.maximum(th - t2, 0.0)
    denom = float(x @ x)
    if denom == 0.0:
        return 0.0
    return max(0.0, float(x @ b) / denom)


def synth(s, t1, t2, thetas, noise=0.0, seed=None):
    th = np.asarray(thetas, dtype=float)
    b = hinge_eval(th, s, t1, t2)
    if noise:
        b = np.maximum(b + np.random.default_rng(seed).normal(0, noise, th.size), 0.0)
    return [Episode(t, v) for t, v in zip(th, b)]


# --- fit -------------------------------------------------------------------

def test_noiseless_recovery():
    data = synth(1.0, 0.5, 1.5, np.arange(0, 2.01, 0.1))
    fit = fit_tlc(data, t_admissible=0.0)
    assert fit.s == pytest.approx(1.0, abs=1e-9)
    assert fit.theta1 == pytest.approx(0.5, abs=1e-9)
    assert fit.theta2 == pytest.approx(1.5, abs=1e-9)
    assert fit.sse <= 1e-12
    assert not fit.degenerate and not fit.no_interior


def test_all_zero_payouts_degenerate():
    data = [Episode(t, 0.0) for t in np.linspace(0, 2, 20)]
    fit = fit_tlc(data, t_admissible=0.0)
    assert fit.s == 0.0
    assert fit.degenerate


def test_too_few_episodes():
    with pytest.raises(EstimationError):
        fit_tlc([Episode(0.1, 0.0)] * 3, t_admissible=0.0)


def test_constant_theta_rejected():
    with pytest.raises(EstimationError):
        fit_tlc([Episode(1.0, float(i)) for i in range(6)], t_admissible=0.0)


def test_knot_constraint_respects_T():
    data = synth(1.0, 0.5, 1.5, np.arange(0, 2.01, 0.05))
    fit = fit_tlc(data, t_admissible=0.7)
    assert fit.theta1 >= 0.7
    assert fit.theta2 >= fit.theta1


def test_monte_carlo_recovery_rate():
    # tolerance frozen after a 200-replication calibration at these settings
    true = (0.5, 0.4, 1.2)
    hits = 0
    reps = 60
    for seed in range(reps):
        rng = np.random.default_rng(seed)
        th = rng.uniform(0, 2, 500)
        data = synth(*true, th, noise=0.02, seed=seed + 10_000)
        fit = fit_tlc(data, t_admissible=0.0)
        ok = (abs(fit.s - true[0]) <= 0.05 and abs(fit.theta1 - true[1]) <= 0.05
              and abs(fit.theta2 - true[2]) <= 0.05)
        hits += ok
    assert hits >= 0.95 * reps


def test_sse_beats_true_parameters():
    rng = np.random.default_rng(3)
    th = rng.uniform(0, 2, 200)
    data = synth(0.8, 0.6, 1.4, th, noise=0.05, seed=4)
    fit = fit_tlc(data, t_admissible=0.0, knot_grid=101)
    s_true = profile_slope(data, 0.6, 1.4)
    # candidate set includes observed thetas and midpoints, so compare against
    # the best of the true pair and its nearest searched neighbors
    assert fit.sse <= hinge_sse(data, s_true, 0.6, 1.4) + 1e-9


def test_fit_matches_independent_profile_search():
    # brute-force the same objective over a coarse independent grid
    rng = np.random.default_rng(8)
    th = np.sort(rng.uniform(0, 2, 120))
    data = synth(0.7, 0.5, 1.3, th, noise=0.03, seed=9)
    cands = np.linspace(0.0, 2.0, 41)
    best = (np.inf, None, None)
    for i, t1 in enumerate(cands):
        for t2 in cands[i:]:
            s = profile_slope(data, t1, t2)
            sse = hinge_sse(data, s, t1, t2)
            if sse < best[0] - 1e-15:
                best = (sse, t1, t2)
    fit = fit_tlc(data, t_admissible=0.0, knot_grid=41)
    # package searches a superset of these candidates; SSE can only improve
    assert fit.sse <= best[0] + 1e-12


@given(st.floats(0.1, 3.0))
@settings(max_examples=50, deadline=None)
def test_scale_equivariance(k):
    th = np.arange(0, 2.01, 0.1)
    base = synth(1.0, 0.5, 1.5, th)
    scaled = [Episode(e.theta, k * e.b) for e in base]
    f0 = fit_tlc(base, t_admissible=0.0)
    f1 = fit_tlc(scaled, t_admissible=0.0)
    assert f1.s == pytest.approx(k * f0.s, rel=1e-9)
    assert f1.theta1 == pytest.approx(f0.theta1, abs=1e-12)
    assert f1.theta2 == pytest.approx(f0.theta2, abs=1e-12)
    assert f1.cap_level == pytest.approx(k * f0.cap_level, rel=1e-9)


def test_predict_matches_hinge():
    fit = fit_tlc(synth(1.0, 0.5, 1.5, np.arange(0, 2.01, 0.1)), t_admissible=0.0)
    grid = np.linspace(0, 2, 97)
    assert predict(grid, fit) == pytest.approx(hinge_eval(grid, 1.0, 0.5, 1.5), abs=1e-9)


# --- classification --------------------------------------------------------

FIT_STD = TlcFit(s=1.0, theta1=0.5, theta2=1.5, sse=0.0, n_obs=21,
                 t_admissible=0.0, grid_resolution=0.01)


def test_classify_worked_labels():
    data = [Episode(0.3, 0.0), Episode(1.0, 0.5), Episode(1.8, 1.7)]
    labels = classify_episodes(data, FIT_STD, tol=0.01)
    assert labels == ["zero", "interior", "override"]


def test_classify_cap():
    assert classify_episodes([Episode(1.9, 1.0)], FIT_STD, tol=0.01) == ["cap"]


def test_classify_against_schedule_matches_rule():
    p = MechanismParams(2, 4, 1, T=0.1, b_bar=0.5, theta_bar=3)
    th = np.linspace(0, 3, 50)
    data = [Episode(t, tlc_policy_linear(float(t), p)) for t in th]
    labels = classify_against_schedule(data, p, tol=1e-9)
    cut = cutoffs(p)
    for e, lab in zip(data, labels):
        assert lab != "override"
        if e.theta < cut.theta_lo:
            assert lab == "zero"
        elif e.theta <= cut.theta_hi:
            assert lab == "interior"
        else:
            assert lab == "cap"


# --- override detection ----------------------------------------------------

def contaminated(shift=0.2, n=400, noise=0.01, seed=0):
    rng = np.random.default_rng(seed)
    th = rng.uniform(0, 2, n)
    b = hinge_eval(th, 1.0, 0.5, 1.5)
    b = b + shift * (th > 1.5)
    b = np.maximum(b + rng.normal(0, noise, n), 0.0)
    return [Episode(t, v) for t, v in zip(th, b)]


def test_override_dummy_recovers_shift():
    data = contaminated(shift=0.2)
    rep = detect_override_shift(data, FIT_STD)
    assert rep.identified
    assert rep.dummy == pytest.approx(0.2, abs=0.02)
    assert not rep.slope_moved
    assert abs(rep.slope_refit - 1.0) / 1.0 < 0.05


def test_override_null_is_quiet():
    data = contaminated(shift=0.0)
    rep = detect_override_shift(data, FIT_STD)
    assert rep.identified
    assert abs(rep.dummy) <= 0.01


def test_override_not_identified_without_cap_data():
    data = [Episode(t, hinge_eval(t, 1.0, 0.5, 1.5)) for t in np.linspace(0, 1.4, 30)]
    rep = detect_override_shift(data, FIT_STD)
    assert not rep.identified
    assert not rep.slope_moved


def test_schedule_as_fit_mirrors_card():
    p = MechanismParams(2, 4, 1, T=0.1, b_bar=0.5, theta_bar=3)
    fit = schedule_as_fit(p)
    cut = cutoffs(p)
    assert fit.s == p.omega_b / p.c
    assert fit.theta1 == cut.theta_lo
    assert fit.theta2 == cut.theta_hi
    assert fit.cap_level == pytest.approx(p.b_bar)


# --- shift attribution -----------------------------------------------------

def fit_like(s, t1, t2, T=0.0, res=1e-6):
    return TlcFit(s=s, theta1=t1, theta2=t2, sse=0.0, n_obs=100,
                  t_admissible=T, grid_resolution=res)


def test_attribution_pure_cost_shift():
    att = attribute_shift(fit_like(1, 0.5, 1.5), fit_like(1, 0.7, 1.7),
                          omega_b=1.0, c=1.0)
    assert att.omega_T_identified
    assert att.implied_delta_omega_T == pytest.approx(0.2)
    assert att.implied_delta_b_bar == pytest.approx(0.0, abs=1e-12)
    assert att.bundle_consistent


def test_attribution_cap_tightening_with_pinned_theta1():
    before = fit_like(1, 0.4, 1.5, T=0.4)
    after = fit_like(1, 0.4, 1.2, T=0.4)
    att = attribute_shift(before, after, omega_b=1.0, c=1.0)
    assert not att.omega_T_identified
    assert att.implied_delta_b_bar == pytest.approx(-0.3)


def test_attribution_decomposition_identity():
    att = attribute_shift(fit_like(0.5, 0.5, 1.5), fit_like(0.5, 0.6, 1.9),
                          omega_b=2.0, c=4.0)
    assert att.delta_theta2 == pytest.approx(
        att.implied_domega_T_over_omega_b + att.implied_c_db_bar_over_omega_b, abs=1e-9
    )


def test_attribution_end_to_end_synthetic():
    p0 = MechanismParams(1, 1, 0.5, T=0.0, b_bar=1.0, theta_bar=3)
    d_omega, d_cap = 0.3, -0.2
    p1 = MechanismParams(1, 1, 0.5 + d_omega, T=0.0, b_bar=1.0 + d_cap, theta_bar=3)
    th = np.linspace(0, 3, 301)
    before = [Episode(t, tlc_policy_linear(float(t), p0)) for t in th]
    after = [Episode(t, tlc_policy_linear(float(t), p1)) for t in th]
    f0 = fit_tlc(before, t_admissible=0.0)
    f1 = fit_tlc(after, t_admissible=0.0)
    att = attribute_shift(f0, f1, omega_b=1.0, c=1.0)
    tol = f0.grid_resolution + f1.grid_resolution + 1e-9
    assert att.implied_delta_omega_T == pytest.approx(d_omega, abs=tol)
    assert att.implied_delta_b_bar == pytest.approx(d_cap, abs=2 * tol)


def test_attribution_announced_match():
    att = attribute_shift(fit_like(1, 0.5, 1.5), fit_like(1, 0.7, 1.7),
                          omega_b=1.0, c=1.0, announced=(0.2, 0.0))
    assert att.announced_match is True
    att2 = attribute_shift(fit_like(1, 0.5, 1.5), fit_like(1, 0.7, 1.7),
                           omega_b=1.0, c=1.0, announced=(0.0, 0.5))
    assert att2.announced_match is False
