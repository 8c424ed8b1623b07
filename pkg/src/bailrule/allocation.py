"""Splitting one treasury across several municipalities' bailout rules.

The planner maximizes the sum of the per-municipality objectives subject to
every local schedule's own threshold and cap plus a joint budget
sum(b_i) <= B.  The KKT system says: charge every municipality a common
shadow price lambda_B on top of its political cost, then let each run its own
threshold-linear-cap rule.  Aggregate demand is continuous and piecewise
linear, decreasing in lambda_B, so a plain bisection clears the budget.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError
from .policy import MechanismParams, cutoffs, tlc_policy_linear

__all__ = [
    "AllocationProblem",
    "AllocationResult",
    "GridOracleResult",
    "allocate",
    "allocation_objective",
    "cap_ordering_report",
    "grid_oracle",
]

#: Budget-residual tolerance for the shadow-price bisection, and iteration cap.
BUDGET_TOL = 1e-8
BISECTION_MAX_ITER = 200


@dataclass(frozen=True)
class AllocationProblem:
    """Municipalities as (params, realized shock) pairs plus the budget."""

    municipalities: tuple
    treasury_limit: float

    def __post_init__(self) -> None:
        munis = tuple((p, float(t)) for p, t in self.municipalities)
        object.__setattr__(self, "municipalities", munis)
        object.__setattr__(self, "treasury_limit", float(self.treasury_limit))
        if not munis:
            raise ParameterError("need at least one municipality")
        if not self.treasury_limit >= 0:
            raise ParameterError(
                f"treasury_limit must be >= 0, got {self.treasury_limit}"
            )
        for p, t in munis:
            if not isinstance(p, MechanismParams):
                raise ParameterError("each municipality needs MechanismParams")
            if not 0 <= t <= p.theta_bar:
                raise ParameterError(
                    f"realized shock {t} outside [0, {p.theta_bar}]"
                )


@dataclass(frozen=True)
class AllocationResult:
    """Per-municipality transfers, the clearing shadow price, and regime flags.

    Flags: 'zero' (no transfer), 'cap' (local consent cap binds), 'budget'
    (interior but rationed by a positive shadow price), 'interior' (local
    first-order condition binds, budget slack).
    """

    allocations: tuple
    lambda_B: float
    flags: tuple

    @property
    def total(self) -> float:
        return sum(self.allocations)


def _shifted(params: MechanismParams, lam: float) -> MechanismParams:
    return replace(params, omega_T=params.omega_T + lam) if lam else params


def _demand(problem: AllocationProblem, lam: float) -> float:
    return sum(
        tlc_policy_linear(theta, _shifted(p, lam))
        for p, theta in problem.municipalities
    )


def allocate(problem: AllocationProblem) -> AllocationResult:
    """Budget-feasible optimum via bisection on the common shadow price.

    If unconstrained demand fits the treasury, lambda_B = 0.  Otherwise
    lambda_B solves aggregate demand = B; the bracket [0, max omega_b * theta]
    pins demand between its unconstrained value and 0.  The returned price
    sits on the feasible (demand <= B) side of the final bracket.
    """
    B = problem.treasury_limit
    if _demand(problem, 0.0) <= B:
        lam = 0.0
    else:
        # demand(hi) stays <= B throughout, so returning the hi end keeps the
        # result feasible to machine precision, far inside BUDGET_TOL.
        lo, hi = 0.0, max(p.omega_b * t for p, t in problem.municipalities)
        for _ in range(BISECTION_MAX_ITER):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if _demand(problem, mid) > B:
                lo = mid
            else:
                hi = mid
        lam = hi

    allocations = []
    flags = []
    for p, theta in problem.municipalities:
        b = tlc_policy_linear(theta, _shifted(p, lam))
        allocations.append(b)
        if b == 0.0:
            flags.append("zero")
        elif b == p.b_bar:
            flags.append("cap")
        elif lam > 0.0:
            flags.append("budget")
        else:
            flags.append("interior")
    return AllocationResult(
        allocations=tuple(allocations), lambda_B=lam, flags=tuple(flags)
    )


def allocation_objective(problem: AllocationProblem, allocations) -> float:
    """Planner value of a feasible transfer vector (benefits net of costs)."""
    return sum(
        (p.omega_b * theta - p.omega_T) * b - 0.5 * p.c * b * b
        for (p, theta), b in zip(problem.municipalities, allocations)
    )


@dataclass(frozen=True)
class GridOracleResult:
    """Best grid point found by :func:`grid_oracle` plus the axis step sizes."""

    allocations: tuple
    objective: float
    grid_steps: tuple


def grid_oracle(
    problem: AllocationProblem, points_per_axis: int = 200
) -> GridOracleResult:
    """Brute-force reference maximizer on a box grid (self-check aid).

    Searches the product grid over [0, local unconstrained optimum] per
    municipality, discarding budget-infeasible combos.  Exponential in the
    number of municipalities, so callers should keep that at three or fewer.
    The reported objective is within first-order quantization loss of the
    true maximum; when the budget binds, individual coordinates may sit a
    few steps from the true optimum (the argmax trades whole steps between
    axes), so compare values, not coordinates.
    """
    if len(problem.municipalities) > 3:
        raise ParameterError("grid_oracle is practical only for <= 3 municipalities")
    axes = []
    for p, theta in problem.municipalities:
        hi = tlc_policy_linear(theta, p)  # optimum never exceeds the local rule
        axes.append(np.linspace(0.0, hi, points_per_axis))
    steps = tuple(ax[1] - ax[0] if len(ax) > 1 else 0.0 for ax in axes)

    grids = np.meshgrid(*axes, indexing="ij")
    total = np.zeros_like(grids[0])
    objective = np.zeros_like(grids[0])
    for (p, theta), g in zip(problem.municipalities, grids):
        total += g
        objective += (p.omega_b * theta - p.omega_T) * g - 0.5 * p.c * g * g
    objective = np.where(total <= problem.treasury_limit + 1e-12, objective, -np.inf)
    flat = int(np.argmax(objective))
    idx = np.unravel_index(flat, objective.shape)
    best = tuple(float(ax[i]) for ax, i in zip(axes, idx))
    return GridOracleResult(
        allocations=best, objective=float(objective[idx]), grid_steps=steps
    )


def cap_ordering_report(problem: AllocationProblem) -> list[tuple[int, float]]:
    """Cap-hit cutoffs theta_hi_i under the clearing shadow price, ascending.

    Returns (municipality index, theta_hi) pairs sorted by cutoff; with
    otherwise equal parameters, a tighter cap or lower political cost means
    an earlier cap hit.  Municipalities with infinite caps sort last.
    """
    result = allocate(problem)
    lam = result.lambda_B
    entries = [
        (i, cutoffs(_shifted(p, lam)).theta_hi)
        for i, (p, _theta) in enumerate(problem.municipalities)
    ]
    entries.sort(key=lambda e: (e[1], e[0]))
    return entries
