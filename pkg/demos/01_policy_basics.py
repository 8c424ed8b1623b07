"""Tour of a single bailout rule: schedule, cutoffs, statics, welfare wedge.

Run:  python3 demos/01_policy_basics.py
"""

import numpy as np

from bailrule import (
    MechanismParams,
    UniformShock,
    activation_derivative,
    comparative_statics,
    cutoffs,
    knife_edge,
    tlc_policy_linear,
    welfare_wedge_shift,
)

# A province facing shocks theta in [0, 3]: transfers are worth omega_b = 2
# per unit shock, implementation cost is quadratic with curvature c = 4,
# every public dollar carries political cost omega_T = 1, shocks below
# T = 0.1 are never bailed out, and the legislature caps transfers at 0.5.
params = MechanismParams(omega_b=2.0, c=4.0, omega_T=1.0, T=0.1, b_bar=0.5, theta_bar=3.0)

cut = cutoffs(params)
print("rule:", params)
print(f"activation cutoff theta_lo = {cut.theta_lo}")
print(f"cap-hit cutoff    theta_hi = {cut.theta_hi}")
print(f"interior slope    omega_b/c = {params.interior_slope}")
print()

# The schedule is threshold-linear-cap: zero, then a line, then flat.
print("theta   transfer")
for theta in (0.3, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0):
    print(f"{theta:5.2f}   {tlc_policy_linear(theta, params):.4f}")
print()

# Comparative statics: how the schedule and its cutoffs respond to shocks
# in the parameters.  A costlier dollar raises both cutoffs; a looser cap
# only moves the upper one.
cs = comparative_statics(params)
print("db/dtheta (interior)      =", cs.db_dtheta)
print("db/domega_T (interior)    =", cs.db_domega_T)
print("dtheta_lo/domega_T        =", cs.dtheta_lo_domega_T)
print("dtheta_hi/domega_T        =", cs.dtheta_hi_domega_T)
print("dtheta_hi/db_bar          =", cs.dtheta_hi_db_bar)
print()

# How often does the rule pay at all?  With a shock distribution in hand,
# the activation probability is 1 - F(theta_lo).  When the admissibility
# threshold T (not the political cost) pins the lower cutoff, the expected
# transfer responds to T through the density at the cutoff.
dist = UniformShock(3.0)
print(f"activation probability      = {1.0 - dist.cdf(cut.theta_lo):.4f}")
strict_T = MechanismParams(2.0, 4.0, 1.0, T=0.8, b_bar=0.5, theta_bar=3.0)
act = activation_derivative(strict_T, dist)
print(f"d E[transfer] / dT at T=0.8 = {act:.4f}")
print()

# A regulator that values transfers socially at lambda_soc != omega_T sees a
# wedge: the rule's cutoffs sit where the legislature wants them, not where
# the social planner would put them.
wedge = welfare_wedge_shift(params, lambda_soc=0.7)
print("cutoff shift vs social optimum:", wedge.cutoff_shift)
print()

# Complete discipline: tighten the cap to zero, or price dollars above the
# best possible benefit, and the rule never pays.
dead_cap = MechanismParams(2.0, 4.0, 1.0, 0.1, b_bar=0.0, theta_bar=3.0)
dead_cost = MechanismParams(2.0, 4.0, 7.0, 0.1, b_bar=0.5, theta_bar=3.0)
print("knife edge, b_bar = 0:        ", knife_edge(dead_cap))
print("knife edge, omega_T too high: ", knife_edge(dead_cost))
print("payouts on a grid, both dead: ",
      float(np.max(tlc_policy_linear(np.linspace(0, 3, 1000), dead_cap))),
      float(np.max(tlc_policy_linear(np.linspace(0, 3, 1000), dead_cost))))
