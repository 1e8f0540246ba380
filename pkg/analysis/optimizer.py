"""Relay-degree distribution design by linear programming

Both programs minimize the reception overhead

    eps_r = (mu_bar / Omega'(1)) * sum_j gamma_j / j

over the edge-perspective relay distribution gamma, subject to gamma >= 0,
sum gamma = 1 and one DE-derived inequality per grid point. Solutions are
converted to node perspective and checked with density evolution at a small
overhead margin before they are handed out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from analysis.density_evolution import DEParams, de_eep, de_uep_weighted
from codes.dist import DegreeDistribution, DistKind, Perspective, from_coefficients
from config.constants import (
    DEFAULT_LP_GRID,
    LP_NEGATIVE_TOLERANCE,
    LP_RESIDUAL_TOLERANCE,
    LP_VALIDATION_MARGIN,
)
from utils.errors import InvalidGrid, InvalidParameter, SolverFailed, ValidationFailed


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    FAILED = "failed"


# scipy.optimize.linprog status codes
_SCIPY_STATUS = {
    0: LpStatus.OPTIMAL,
    1: LpStatus.FAILED,
    2: LpStatus.INFEASIBLE,
    3: LpStatus.UNBOUNDED,
    4: LpStatus.FAILED,
}


@dataclass(frozen=True)
class LpProblem:
    """
    minimize objective . x  s.t.  a_ge x >= b_ge, x >= 0 (and sum x = 1 when normalized)
    """

    objective: np.ndarray
    a_ge: np.ndarray
    b_ge: np.ndarray
    grid: np.ndarray | None = None
    eps: float | None = None
    normalized: bool = True

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    objective_value: float | None = None
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL

    @property
    def gamma_edge(self) -> DegreeDistribution | None:
        """Edge-perspective relay distribution (normalized programs only)"""
        if not self.optimal or self.x is None:
            return None
        return _as_distribution(self.x)


@dataclass(frozen=True)
class RelayDesign:
    """Outcome of optimize_relay_distribution"""

    gamma: DegreeDistribution
    gamma_edge: DegreeDistribution
    epsilon_r_star: float
    validated: bool
    validation_overhead: float
    validation_fixed_point: tuple = field(default=())
    solution: LpSolution | None = field(default=None, repr=False)


def _check_grid(d_max, eps, m):
    if d_max < 1:
        raise InvalidGrid(f"d_max must be >= 1, got {d_max}")
    if m < 2:
        raise InvalidGrid(f"Grid needs at least 2 points, got {m}")
    if not 0.0 < eps < 1.0:
        raise InvalidGrid(f"Target erasure rate must lie in (0, 1), got {eps}")


def _objective(omega, mu_bar, d_max):
    if mu_bar <= 0:
        raise InvalidParameter(f"mu_bar must be positive, got {mu_bar}")
    return (mu_bar / omega.mean_degree()) / np.arange(1, d_max + 1)


def _powers(values, d_max):
    # column j-1 holds value^(j-1); numpy keeps 0.0 ** 0 == 1.0
    return np.power.outer(np.asarray(values, dtype=float), np.arange(d_max))


def build_lp1(omega: DegreeDistribution, mu_bar: float, d_max: int, eps: float, m: int = DEFAULT_LP_GRID) -> LpProblem:
    """
    EEP program over x_1 = 0 < ... < x_m = 1 - eps

    Row i: sum_j gamma_j Omega(x_i)^(j-1) >= -ln(1 - x_i) / (mu_bar omega(x_i)).
    The x = 0 row takes its limit value 0 on the right-hand side.

    Raises:
        InvalidGrid: If d_max < 1, m < 2 or eps is not in (0, 1)
    """
    _check_grid(d_max, eps, m)
    omega_edge = omega.to_edge_perspective()
    grid = np.linspace(0.0, 1.0 - eps, m)
    a_ge = _powers([omega.evaluate(x) for x in grid], d_max)
    b_ge = np.zeros(m)
    for i, x in enumerate(grid):
        if x > 0.0:
            b_ge[i] = -math.log(1.0 - x) / (mu_bar * omega_edge.evaluate(x))
    return LpProblem(_objective(omega, mu_bar, d_max), a_ge, b_ge, grid, eps)


def build_lp2(
    omega: DegreeDistribution,
    mu_bar: float,
    d_max: int,
    eps: float,
    m: int,
    q,
    alpha,
    literal: bool = False,
) -> LpProblem:
    """
    UEP program over z_1 = 1 > ... > z_m = eps with bias factors w_i = q_i / alpha_i

    Default (trajectory P_i = z^w_i):
        Phi(z) = sum_i q_i Omega(1 - z^w_i),  rhs = max_i -ln z / (mu_bar omega(1 - z^w_i))
    literal=True:
        Phi(z) = Omega(1 - sum_i q_i z^w_i),  rhs = -ln z / (mu_bar omega(z))

    The z = 1 row takes its limit value 0 on the right-hand side.
    """
    _check_grid(d_max, eps, m)
    q = np.asarray(q, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if q.shape != alpha.shape or (alpha <= 0).any():
        raise InvalidParameter("q and alpha need the same length and alpha > 0")
    w = q / alpha
    omega_edge = omega.to_edge_perspective()
    grid = np.linspace(1.0, eps, m)

    phi = np.empty(m)
    b_ge = np.zeros(m)
    for k, z in enumerate(grid):
        powered = z ** w
        if literal:
            phi[k] = omega.evaluate(1.0 - float(np.dot(q, powered)))
        else:
            phi[k] = float(np.dot(q, [omega.evaluate(1.0 - p) for p in powered]))
        if z >= 1.0:
            continue
        if literal:
            b_ge[k] = -math.log(z) / (mu_bar * omega_edge.evaluate(z))
        else:
            b_ge[k] = max(-math.log(z) / (mu_bar * omega_edge.evaluate(1.0 - p)) for p in powered)
    return LpProblem(_objective(omega, mu_bar, d_max), _powers(phi, d_max), b_ge, grid, eps)


def constraint_residuals(problem: LpProblem, x) -> np.ndarray:
    """a_ge x - b_ge; non-negative entries mean satisfied rows"""
    return problem.a_ge @ np.asarray(x, dtype=float) - problem.b_ge


def solve_lp(problem: LpProblem) -> LpSolution:
    """
    Solve with the HiGHS dual simplex

    Tiny negative components of an optimal normalized solution are clipped
    and the vector renormalized.
    """
    n = problem.num_vars
    a_eq = np.ones((1, n)) if problem.normalized else None
    b_eq = np.ones(1) if problem.normalized else None
    result = linprog(
        c=problem.objective,
        A_ub=-problem.a_ge,
        b_ub=-problem.b_ge,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0, None)] * n,
        method="highs-ds",
    )
    status = _SCIPY_STATUS.get(result.status, LpStatus.FAILED)
    if status is not LpStatus.OPTIMAL:
        return LpSolution(status, message=result.message)

    x = np.asarray(result.x, dtype=float)
    if problem.normalized:
        x = np.where(x < 0.0, 0.0, x) if (x >= -LP_NEGATIVE_TOLERANCE).all() else x
        x = x / x.sum()
    return LpSolution(status, x, float(problem.objective @ x), result.message)


def _as_distribution(x) -> DegreeDistribution:
    values = [float(v) for v in x]
    while len(values) > 1 and values[-1] <= LP_NEGATIVE_TOLERANCE:
        values.pop()
    return from_coefficients(values, Perspective.EDGE, DistKind.RELAY)


def _validate(omega, gamma, epsilon_r, eps, q, alpha):
    if q is None:
        result = de_eep(DEParams(omega=omega, gamma=gamma, epsilon_r=epsilon_r))
        return result.fixed_point, result.fixed_point[0] <= eps
    result = de_uep_weighted(DEParams(omega=omega, gamma=gamma, epsilon_r=epsilon_r, q=tuple(q), alpha=tuple(alpha)))
    targets = eps ** (np.asarray(q, dtype=float) / np.asarray(alpha, dtype=float))
    return result.fixed_point, bool((np.asarray(result.fixed_point) <= targets).all())


def optimize_relay_distribution(
    omega: DegreeDistribution,
    mu_bar: float,
    d_max: int,
    eps: float,
    m: int = DEFAULT_LP_GRID,
    q=None,
    alpha=None,
    literal: bool = False,
    strict: bool = True,
) -> RelayDesign:
    """
    Build, solve, convert to node perspective and validate

    EEP (q is None) solves LP1 and requires the DE fixed point <= eps at
    eps_r = 1.02 eps_r*. UEP solves LP2 and requires P_i <= eps^w_i per source.

    Raises:
        SolverFailed: If the program is not solved to optimality
        ValidationFailed: If validation fails and strict is set
    """
    if q is None:
        problem = build_lp1(omega, mu_bar, d_max, eps, m)
    else:
        problem = build_lp2(omega, mu_bar, d_max, eps, m, q, alpha, literal)
    solution = solve_lp(problem)
    if not solution.optimal:
        raise SolverFailed(solution.status, f"Relay LP is {solution.status.value}: {solution.message}")

    residual = constraint_residuals(problem, solution.x).min()
    if residual < -LP_RESIDUAL_TOLERANCE:
        raise SolverFailed(LpStatus.FAILED, f"LP solution violates a constraint by {-residual:.3g}")

    gamma_edge = solution.gamma_edge
    gamma = gamma_edge.to_node_perspective()
    overhead = LP_VALIDATION_MARGIN * solution.objective_value
    fixed_point, validated = _validate(omega, gamma, overhead, eps, q, alpha)
    if strict and not validated:
        raise ValidationFailed(
            f"Optimized distribution misses the target {eps} at eps_r = {overhead:.6g} (fixed point {fixed_point})"
        )
    return RelayDesign(
        gamma=gamma,
        gamma_edge=gamma_edge,
        epsilon_r_star=solution.objective_value,
        validated=validated,
        validation_overhead=overhead,
        validation_fixed_point=tuple(fixed_point),
        solution=solution,
    )


def sweep_mu(omega: DegreeDistribution, mus, d_max: int, eps: float, m: int = DEFAULT_LP_GRID, q=None, alpha=None, literal=False) -> list:
    """
    (mu_bar, eps_r*, status) for each mu_bar; eps_r* is None when the program is not optimal
    """
    frontier = []
    for mu in mus:
        if q is None:
            problem = build_lp1(omega, mu, d_max, eps, m)
        else:
            problem = build_lp2(omega, mu, d_max, eps, m, q, alpha, literal)
        solution = solve_lp(problem)
        frontier.append((float(mu), solution.objective_value, solution.status))
    return frontier
