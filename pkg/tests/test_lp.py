import numpy as np
import pytest

from dexpfam import LpStatus, build_span, solve_feasibility
from dexpfam.errors import NonFiniteInput, NumericalBreakdown, ValidationError
from dexpfam.lp import FEAS_TOL, LpProblem, problem
import dexpfam.lp as lp_mod
from dexpfam.uniqueness import _escape_problem


def test_single_variable_feasible():
    p = problem(1, inequalities_ge0=[[1.0]], normalization=[1.0])
    out = solve_feasibility(p)
    assert out.status is LpStatus.FEASIBLE
    np.testing.assert_allclose(out.witness, [1.0], atol=1e-9)


def test_single_variable_infeasible():
    # a >= 0 and -a >= 0 force a = 0, clashing with a = 1.
    p = problem(1, inequalities_ge0=[[1.0], [-1.0]], normalization=[1.0])
    assert solve_feasibility(p).status is LpStatus.INFEASIBLE


def test_piecewise_escape_problem_infeasible(piecewise):
    # No nonnegative member of the span vanishes on {-1, 2} and hits 1 at -2.
    _, span = piecewise
    p = _escape_problem(span, [1, 4], 0)
    assert solve_feasibility(p).status is LpStatus.INFEASIBLE


def test_witness_revalidates_on_random_feasible_problems():
    rng = np.random.default_rng(5)
    for _ in range(60):
        d = int(rng.integers(1, 7))
        point = rng.normal(size=d)
        ineqs = []
        for _ in range(int(rng.integers(0, 10))):
            row = rng.normal(size=d)
            if row @ point < 0:
                row = -row
            ineqs.append(row)
        eqs = []
        for _ in range(int(rng.integers(0, 3))):
            row = rng.normal(size=d)
            eqs.append((row, float(row @ point)))
        norm_row = rng.normal(size=d)
        while abs(norm_row @ point) < 1e-3:
            norm_row = rng.normal(size=d)
        norm_row = norm_row / (norm_row @ point)
        out = solve_feasibility(problem(d, eqs, ineqs, norm_row))
        assert out.status is LpStatus.FEASIBLE
        w = out.witness
        for row, rhs in eqs:
            assert abs(row @ w - rhs) <= FEAS_TOL
        for row in ineqs:
            assert row @ w >= -FEAS_TOL
        assert abs(norm_row @ w - 1.0) <= FEAS_TOL


def test_deterministic_witness():
    p = problem(
        3,
        equalities=[([1.0, 1.0, 1.0], 2.0)],
        inequalities_ge0=[[1.0, 0.0, 0.0], [0.0, 1.0, -1.0]],
        normalization=[0.0, 1.0, 0.0],
    )
    first = solve_feasibility(p)
    second = solve_feasibility(p)
    assert first.status == second.status
    np.testing.assert_array_equal(first.witness, second.witness)


def test_no_constraints_is_feasible():
    out = solve_feasibility(problem(2))
    assert out.feasible
    np.testing.assert_array_equal(out.witness, np.zeros(2))


def test_row_shape_validation():
    with pytest.raises(ValidationError):
        problem(2, inequalities_ge0=[[1.0]])
    with pytest.raises(NonFiniteInput):
        problem(1, inequalities_ge0=[[np.inf]])
    with pytest.raises(ValidationError):
        LpProblem(num_vars=0)


def test_pivot_budget_guard(monkeypatch):
    monkeypatch.setattr(lp_mod, "PIVOT_BUDGET_FACTOR", 0)
    p = problem(1, inequalities_ge0=[[1.0]], normalization=[1.0])
    with pytest.raises(NumericalBreakdown):
        solve_feasibility(p)
