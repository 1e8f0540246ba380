import numpy as np
import pytest

from analysis.optimizer import (
    LpStatus,
    build_lp1,
    build_lp2,
    constraint_residuals,
    optimize_relay_distribution,
    solve_lp,
    sweep_mu,
)
from codes.dist import Perspective
from utils.errors import InvalidGrid, SolverFailed

EPS = 0.01


def test_grid_validation(rsd):
    with pytest.raises(InvalidGrid):
        build_lp1(rsd, 10.0, 4, EPS, 1)
    with pytest.raises(InvalidGrid):
        build_lp1(rsd, 10.0, 0, EPS, 50)
    with pytest.raises(InvalidGrid):
        build_lp1(rsd, 10.0, 4, 1.5, 50)


def test_lp1_rows(rsd):
    problem = build_lp1(rsd, 10.0, 4, EPS, 50)
    assert problem.a_ge.shape == (50, 4)
    assert problem.grid[0] == 0.0 and problem.grid[-1] == pytest.approx(1 - EPS)
    assert problem.b_ge[0] == 0.0
    assert (problem.a_ge[:, 0] == 1.0).all()
    assert problem.objective == pytest.approx((10.0 / rsd.mean_degree()) / np.arange(1, 5))


def test_degree_one_threshold(identity):
    # Omega = x, d_max = 1: feasible iff mu_bar >= ln(1 / eps)
    design = optimize_relay_distribution(identity, 5.0, 1, EPS, 40)
    assert design.epsilon_r_star == pytest.approx(5.0)
    assert design.gamma.coefficients == pytest.approx((1.0,))
    assert design.validated
    with pytest.raises(SolverFailed) as info:
        optimize_relay_distribution(identity, 4.0, 1, EPS, 40)
    assert info.value.status is LpStatus.INFEASIBLE


def test_eep_design(rsd):
    mu_bar = 12.0
    problem = build_lp1(rsd, mu_bar, 4, EPS, 100)
    solution = solve_lp(problem)
    assert solution.optimal
    assert solution.x.sum() == pytest.approx(1.0)
    assert (solution.x >= 0).all()
    assert constraint_residuals(problem, solution.x).min() >= -1e-7
    assert solution.objective_value == pytest.approx((mu_bar / rsd.mean_degree()) * np.dot(solution.x, 1 / np.arange(1, 5)))

    design = optimize_relay_distribution(rsd, mu_bar, 4, EPS, 100)
    assert design.gamma.perspective is Perspective.NODE
    assert design.gamma.d_max <= 4
    assert design.gamma[1] > 0
    # eps_r* = mu_bar / (Omega'(1) Gamma'(1))
    assert design.epsilon_r_star == pytest.approx(mu_bar / (rsd.mean_degree() * design.gamma.mean_degree()), rel=1e-6)
    assert design.validation_overhead == pytest.approx(1.02 * design.epsilon_r_star)
    assert design.validated
    assert design.validation_fixed_point[0] <= EPS


def test_finer_grid_costs_at_least_as_much(rsd):
    coarse = solve_lp(build_lp1(rsd, 12.0, 4, EPS, 40))
    fine = solve_lp(build_lp1(rsd, 12.0, 4, EPS, 79))
    assert fine.objective_value >= coarse.objective_value - 1e-9


def test_lp2_with_equal_bias_matches_lp1(rsd, four_sources):
    _, alpha = four_sources
    lp1 = solve_lp(build_lp1(rsd, 12.0, 4, EPS, 60))
    lp2 = solve_lp(build_lp2(rsd, 12.0, 4, EPS, 60, alpha, alpha))
    assert lp2.optimal
    assert lp2.objective_value == pytest.approx(lp1.objective_value, rel=1e-6)


def test_uep_design(rsd, four_sources):
    q, alpha = four_sources
    problem = build_lp2(rsd, 12.0, 4, EPS, 100, q, alpha)
    assert problem.grid[0] == 1.0 and problem.grid[-1] == pytest.approx(EPS)
    solution = solve_lp(problem)
    assert solution.optimal
    assert constraint_residuals(problem, solution.x).min() >= -1e-7
    design = optimize_relay_distribution(rsd, 12.0, 4, EPS, 100, q, alpha, strict=True)
    assert design.validated
    assert design.epsilon_r_star == pytest.approx(solution.objective_value)
    assert len(design.validation_fixed_point) == 4
    targets = EPS ** (np.asarray(q) / np.asarray(alpha))
    assert (np.asarray(design.validation_fixed_point) <= targets).all()


def test_literal_lp2_shape(rsd, four_sources):
    q, alpha = four_sources
    literal = build_lp2(rsd, 12.0, 4, EPS, 30, q, alpha, literal=True)
    default = build_lp2(rsd, 12.0, 4, EPS, 30, q, alpha)
    assert literal.a_ge.shape == default.a_ge.shape
    assert literal.b_ge[0] == 0.0
    assert not np.allclose(literal.b_ge, default.b_ge)


def test_sweep_reports_frontier(identity):
    frontier = sweep_mu(identity, [4.0, 5.0, 6.0], 1, EPS, 20)
    assert [status for _, _, status in frontier] == [LpStatus.INFEASIBLE, LpStatus.OPTIMAL, LpStatus.OPTIMAL]
    assert frontier[0][1] is None
    assert frontier[1][1] == pytest.approx(5.0)
    assert frontier[2][1] == pytest.approx(6.0)


@pytest.mark.parametrize("weighted", [False, True], ids=["lp1", "lp2"])
def test_larger_degree_cap_never_costs_more(rsd, four_sources, weighted):
    q, alpha = four_sources if weighted else (None, None)
    designs = [optimize_relay_distribution(rsd, 12.0, d_max, EPS, q=q, alpha=alpha, strict=True) for d_max in (2, 4, 8)]
    assert all(design.validated for design in designs)
    thresholds = [design.epsilon_r_star for design in designs]
    assert thresholds[0] >= thresholds[1] - 1e-9
    assert thresholds[1] >= thresholds[2] - 1e-9
    assert all(design.gamma.d_max <= d_max for design, d_max in zip(designs, (2, 4, 8)))
