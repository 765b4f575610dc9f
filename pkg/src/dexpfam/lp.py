"""Linear-programming feasibility by a self-contained phase-I simplex.

Only feasibility is ever asked of this module: does a coefficient vector
exist satisfying a batch of equalities, nonnegativity inequalities, and one
normalization equality?  Problems are tiny (tens of variables/constraints),
so a dense tableau with Bland's anti-cycling rule is deterministic, exact
enough, and dependency-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import NonFiniteInput, NumericalBreakdown, ValidationError

__all__ = ["LpProblem", "LpOutcome", "LpStatus", "solve_feasibility"]

# Constraint satisfaction tolerance for witnesses and phase-I optimum.
FEAS_TOL = 1e-7

# Pivots smaller than this are treated as zero.
PIVOT_EPS = 1e-12

# Reduced costs above -RC_TOL count as optimal.
RC_TOL = 1e-9

# Pivot budget = factor * (num_vars + num_constraints); exceeding it means
# the solve is not trusted.  Module-level so tests can exercise the guard.
PIVOT_BUDGET_FACTOR = 10


class LpStatus(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LpProblem:
    """Feasibility problem over ``num_vars`` free real variables ``a``.

    Constraints: ``row @ a == rhs`` for each equality, ``row @ a >= 0`` for
    each inequality row, and optionally one normalization ``row @ a == 1``
    that selects a nontrivial point of an otherwise scale-free cone.
    """

    num_vars: int
    equalities: tuple[tuple[np.ndarray, float], ...] = ()
    inequalities_ge0: tuple[np.ndarray, ...] = ()
    normalization: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValidationError("LP needs at least one variable")
        rows = [r for r, _ in self.equalities]
        rows += list(self.inequalities_ge0)
        if self.normalization is not None:
            rows.append(self.normalization)
        for r in rows:
            r = np.asarray(r)
            if r.shape != (self.num_vars,):
                raise ValidationError(
                    f"constraint row shape {r.shape} != ({self.num_vars},)"
                )
            if not np.all(np.isfinite(r)):
                raise NonFiniteInput("constraint rows must be finite")
        for _, rhs in self.equalities:
            if not np.isfinite(rhs):
                raise NonFiniteInput("equality right-hand sides must be finite")

    @property
    def num_constraints(self) -> int:
        extra = 0 if self.normalization is None else 1
        return len(self.equalities) + len(self.inequalities_ge0) + extra


@dataclass(frozen=True)
class LpOutcome:
    """Result of a feasibility solve; ``witness`` re-validates when feasible."""

    status: LpStatus
    witness: Optional[np.ndarray] = None

    @property
    def feasible(self) -> bool:
        return self.status is LpStatus.FEASIBLE


def problem(
    num_vars: int,
    equalities: Sequence[tuple[Sequence[float], float]] = (),
    inequalities_ge0: Sequence[Sequence[float]] = (),
    normalization: Optional[Sequence[float]] = None,
) -> LpProblem:
    """Convenience constructor coercing sequences to arrays."""
    eqs = tuple(
        (np.asarray(r, dtype=float), float(b)) for r, b in equalities
    )
    ineqs = tuple(np.asarray(r, dtype=float) for r in inequalities_ge0)
    norm = None if normalization is None else np.asarray(normalization, dtype=float)
    return LpProblem(num_vars, eqs, ineqs, norm)


def solve_feasibility(p: LpProblem) -> LpOutcome:
    """Decide feasibility; deterministic Bland pivoting, no randomness.

    Raises:
        NumericalBreakdown: pivot selection stalls below ``PIVOT_EPS`` without
            a settled verdict, the pivot budget is exhausted, or a claimed
            witness fails re-validation against the raw constraints.
    """
    d = p.num_vars
    eq_rows = [np.asarray(r, dtype=float) for r, _ in p.equalities]
    eq_rhs = [float(b) for _, b in p.equalities]
    if p.normalization is not None:
        eq_rows.append(np.asarray(p.normalization, dtype=float))
        eq_rhs.append(1.0)
    in_rows = [np.asarray(r, dtype=float) for r in p.inequalities_ge0]

    m_eq, m_in = len(eq_rows), len(in_rows)
    m = m_eq + m_in
    if m == 0:
        return LpOutcome(LpStatus.FEASIBLE, witness=np.zeros(d))

    # Standard form over z = [a+, a-, slack] >= 0:
    #   [E, -E, 0] z = e          (equalities)
    #   [G, -G, -I] z = 0         (each inequality row minus its slack)
    n_real = 2 * d + m_in
    A = np.zeros((m, n_real))
    b = np.zeros(m)
    for i, (row, rhs) in enumerate(zip(eq_rows, eq_rhs)):
        A[i, :d] = row
        A[i, d : 2 * d] = -row
        b[i] = rhs
    for j, row in enumerate(in_rows):
        i = m_eq + j
        A[i, :d] = row
        A[i, d : 2 * d] = -row
        A[i, 2 * d + j] = -1.0
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # Phase-I: artificial basis, minimize the artificials' sum.
    n = n_real + m
    T = np.zeros((m, n + 1))
    T[:, :n_real] = A
    T[:, n_real:n] = np.eye(m)
    T[:, n] = b
    basis = np.arange(n_real, n)
    cbar = np.zeros(n)
    cbar[:n_real] = -A.sum(axis=0)

    budget = PIVOT_BUDGET_FACTOR * (d + p.num_constraints)
    for _ in range(budget):
        candidates = np.nonzero(cbar < -RC_TOL)[0]
        if candidates.size == 0:
            break
        j = int(candidates[0])  # Bland: smallest eligible index
        col = T[:, j]
        rows = np.nonzero(col > PIVOT_EPS)[0]
        if rows.size == 0:
            # Phase-I objective is bounded below; a missing pivot is a
            # numerical artifact, not genuine unboundedness.
            raise NumericalBreakdown(
                "no admissible pivot above threshold; verdict unresolved"
            )
        ratios = T[rows, n] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + PIVOT_EPS * max(1.0, best)]
        r = int(tied[np.argmin(basis[tied])])  # Bland tie-break

        pivot = T[r, j]
        T[r] /= pivot
        coeffs = T[:, j].copy()
        coeffs[r] = 0.0
        T -= np.outer(coeffs, T[r])
        cbar = cbar - cbar[j] * T[r, :n]
        basis[r] = j
    else:
        raise NumericalBreakdown(
            f"pivot budget of {budget} exhausted without convergence"
        )

    # Phase-I optimum: the artificials still in the basis carry its value.
    artificial = basis >= n_real
    obj = float(T[artificial, n].sum()) if artificial.any() else 0.0
    if obj > FEAS_TOL:
        return LpOutcome(LpStatus.INFEASIBLE)

    z = np.zeros(n)
    z[basis] = T[:, n]
    a = z[:d] - z[d : 2 * d]

    # Re-validate against the raw constraints before vouching for it.
    for row, rhs in zip(eq_rows, eq_rhs):
        if abs(float(row @ a) - rhs) > FEAS_TOL:
            raise NumericalBreakdown("feasible witness failed equality re-validation")
    for row in in_rows:
        if float(row @ a) < -FEAS_TOL:
            raise NumericalBreakdown("feasible witness failed inequality re-validation")
    return LpOutcome(LpStatus.FEASIBLE, witness=a)
