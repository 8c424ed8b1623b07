"""Where the cap comes from: weighted representatives voting under a quota.

Each representative i carries vote weight w_i and tolerates transfers up to
theta * x_i, where x_i is a personal threshold drawn from a distribution H.
A transfer passes when the supporting weight reaches the quota tau.  The
largest passable transfer is the consent cap — and it has a closed form.

Run:  python3 demos/02_consent_caps.py
"""

import numpy as np

from bailrule import (
    DiscreteThreshold,
    FiniteLegislature,
    PoliticalCostSpec,
    UniformThreshold,
    WeightProfile,
    aggregate_support,
    bundle_check,
    consent_cap_analytic,
    empirical_cap,
    political_cost,
)

# --- a tiny legislature you can enumerate by hand ---------------------------

leg = FiniteLegislature(
    beneficiary_weights=[0.3, 0.3],
    beneficiary_thresholds=[0.4, 0.8],
    taxpayer_weight=0.4,
)
theta = 1.0
print("support for b = 0.3:", aggregate_support(0.3, theta, leg))
print("support for b = 0.5:", aggregate_support(0.5, theta, leg))
print("support for b = 0.9:", aggregate_support(0.9, theta, leg))
for tau in (0.3, 0.5, 0.7):
    print(f"cap under quota tau = {tau}: {empirical_cap(theta, leg, tau)}")
print()

# --- the closed form: b_bar = T * H^-1(1 - tau / w_B) ------------------------

prof = WeightProfile(w_beneficiary=0.6, tau=0.25, threshold_dist=UniformThreshold(0, 2), T=1.0)
print("analytic cap, uniform thresholds:", consent_cap_analytic(prof))

# at an atom of H the generalized inverse matters; the finite scan is the
# ground truth and the analytic formula matches its convention
atom_prof = WeightProfile(0.6, 0.3, DiscreteThreshold([0.4, 0.8], [0.5, 0.5]), T=1.0)
print("analytic cap at an atom:         ", consent_cap_analytic(atom_prof))
print("matching finite scan:            ",
      empirical_cap(1.0, FiniteLegislature([0.3, 0.3], [0.4, 0.8], 0.4), 0.3))
print()

# --- Monte Carlo: sampled legislatures converge to the closed form -----------

H = UniformThreshold(0.0, 2.0)
rng = np.random.default_rng(7)
for n in (100, 1_000, 10_000, 100_000):
    xs = H.sample(n, rng)
    big = FiniteLegislature(np.full(n, 0.6 / n), xs, taxpayer_weight=0.4)
    cap_n = empirical_cap(1.0, big, prof.tau)
    print(f"N = {n:>7,}: sampled cap = {cap_n:.4f}   (analytic {consent_cap_analytic(prof):.4f})")
print()

# --- salience turns weight shifts into political cost -------------------------

spec = PoliticalCostSpec(lambda0=0.4, lambda1=2.0)
for salience in (0.1, 0.3, 0.6):
    print(f"salience {salience}: omega_T = {political_cost(spec, salience)}")
print()

# Both omega_T and b_bar descend from the same weights, so a reform that
# raises the political cost while loosening the cap is incoherent.
print("cost up, cap tightened (coherent):  ", bundle_check((1.0, 0.5), (1.2, 0.4)))
print("cost up, cap loosened (incoherent): ", bundle_check((1.0, 0.5), (1.2, 0.6)))
print("cost down, cap loosened (coherent): ", bundle_check((1.0, 0.5), (0.9, 0.6)))
