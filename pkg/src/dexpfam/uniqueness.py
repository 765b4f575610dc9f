"""Deciding whether a state subset pins down the nonnegative cone of a span.

A subset U is a *set of uniqueness* for the cone when the zero function is
the only nonnegative span member vanishing on U.  The decision runs one tiny
LP per outside point x0: look for a nonnegative span member that vanishes on
U and equals 1 at x0 (scale is free, so "positive at x0" and "equal to 1"
are interchangeable).  Feasible points "escape"; the infeasible ones form
the closure of U together with U itself.  Summing the escape witnesses gives
a single nonnegative function vanishing exactly on the closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import lp
from .errors import EmptySubset, ValidationError
from .linspan import LinearSpan

__all__ = [
    "UniquenessReport",
    "is_set_of_uniqueness",
    "closure",
    "monotonicity_check",
]


@dataclass(frozen=True)
class UniquenessReport:
    """Verdict for one subset, with the evidence backing it.

    Attributes:
        subset: the queried states U (sorted).
        is_uniqueness: True iff closure covers the whole space.
        closure: all states forced to zero by vanishing on U (superset of U).
        witness_delta: coefficients of a nonnegative span member vanishing
            exactly on the closure; None when U is of uniqueness.
        escape_witnesses: per escaped state x, coefficients of a nonnegative
            span member that vanishes on U and equals 1 at x.
    """

    subset: tuple[int, ...]
    is_uniqueness: bool
    closure: frozenset[int]
    witness_delta: Optional[np.ndarray]
    escape_witnesses: dict[int, np.ndarray]


def _escape_problem(span: LinearSpan, subset: list[int], target: int) -> lp.LpProblem:
    cols = span.basis  # (d, K); column x holds the basis values at state x
    equalities = tuple((cols[:, u].copy(), 0.0) for u in subset)
    inequalities = tuple(cols[:, x].copy() for x in range(span.num_states))
    return lp.LpProblem(
        num_vars=span.dim,
        equalities=equalities,
        inequalities_ge0=inequalities,
        normalization=cols[:, target].copy(),
    )


def _checked_subset(span: LinearSpan, subset: Iterable[int]) -> list[int]:
    u = sorted(set(int(i) for i in subset))
    if not u:
        raise EmptySubset("uniqueness queries need a nonempty subset")
    if u[0] < 0 or u[-1] >= span.num_states:
        raise ValidationError(f"subset indices out of range [0, {span.num_states})")
    return u


def closure(span: LinearSpan, subset: Iterable[int]) -> UniquenessReport:
    """Compute the closure of ``subset`` and the witnesses behind it.

    Every outside point is probed in index order, with no early exit: the
    closure set itself is a deliverable, not only the boolean verdict.
    """
    u = _checked_subset(span, subset)
    in_u = set(u)
    closed = set(u)
    escapes: dict[int, np.ndarray] = {}
    for x in range(span.num_states):
        if x in in_u:
            continue
        outcome = lp.solve_feasibility(_escape_problem(span, u, x))
        if outcome.feasible:
            escapes[x] = outcome.witness
        else:
            closed.add(x)

    if escapes:
        delta = np.sum(list(escapes.values()), axis=0)
    else:
        delta = None
    return UniquenessReport(
        subset=tuple(u),
        is_uniqueness=len(closed) == span.num_states,
        closure=frozenset(closed),
        witness_delta=delta,
        escape_witnesses=escapes,
    )


def is_set_of_uniqueness(span: LinearSpan, subset: Iterable[int]) -> bool:
    """True iff no nonzero nonnegative span member vanishes on ``subset``."""
    return closure(span, subset).is_uniqueness


def monotonicity_check(
    span: LinearSpan, subset: Iterable[int], superset: Iterable[int]
) -> bool:
    """Check the implication "U of uniqueness => V of uniqueness" for U ⊆ V.

    A property-test helper: must return True on every valid nested pair.
    """
    u = set(_checked_subset(span, subset))
    v = set(_checked_subset(span, superset))
    if not u <= v:
        raise ValidationError("monotonicity_check needs subset ⊆ superset")
    if not is_set_of_uniqueness(span, u):
        return True
    return is_set_of_uniqueness(span, v)
