"""Linear spaces of exponents, tabulated over a finite state space.

A span is stored as a full-rank basis matrix whose row j holds the values of
the j-th basis function on every state.  Generators supplied by callers may
be redundant; construction keeps a maximal independent subset of the
original rows so coefficients stay interpretable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptySubset, NonFiniteInput, ValidationError

__all__ = ["LinearSpan", "build_span", "evaluate", "oscillation", "contains_constants"]

# Relative pivot threshold for declaring a generator row dependent.
RANK_TOL = 1e-10

# Max-norm residual below which the constant function counts as in-span.
CONSTANTS_TOL = 1e-9


@dataclass(frozen=True)
class LinearSpan:
    """Full-rank basis of a linear space of functions on K states.

    Attributes:
        basis: (dim x K) array; row j tabulates basis function j.
        kept_rows: indices of the originally supplied generator rows that
            form the stored basis (construction drops dependent rows).
    """

    basis: np.ndarray
    kept_rows: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def num_states(self) -> int:
        return self.basis.shape[1]


def _independent_rows(rows: np.ndarray, rel_tol: float = RANK_TOL) -> list[int]:
    """Indices of a maximal independent subset, scanning rows in order.

    Modified Gram-Schmidt with one re-orthogonalization pass; a row counts
    as dependent when its residual max-norm falls below ``rel_tol`` times
    the largest entry of the input matrix.
    """
    scale = np.max(np.abs(rows)) if rows.size else 0.0
    if scale == 0.0:
        return []
    kept: list[int] = []
    ortho: list[np.ndarray] = []
    for i, row in enumerate(rows):
        v = row.astype(float, copy=True)
        for _ in range(2):
            for u in ortho:
                v -= (v @ u) * u
        if np.max(np.abs(v)) > rel_tol * scale:
            kept.append(i)
            ortho.append(v / np.linalg.norm(v))
    return kept


def build_span(rows: Iterable[Sequence[float]] | np.ndarray) -> LinearSpan:
    """Build a span from generator rows, reducing them to a basis.

    Raises:
        ValidationError: no rows, ragged rows, or all rows zero.
        NonFiniteInput: NaN/inf entries.
    """
    mat = np.atleast_2d(np.asarray(rows, dtype=float))
    if mat.ndim != 2 or mat.size == 0:
        raise ValidationError("span generators must form a nonempty 2-d matrix")
    if not np.all(np.isfinite(mat)):
        raise NonFiniteInput("span generators must be finite")
    kept = _independent_rows(mat)
    if not kept:
        raise ValidationError("span generators are all (numerically) zero")
    basis = mat[kept].copy()
    basis.flags.writeable = False
    return LinearSpan(basis=basis, kept_rows=tuple(kept))


def _check_coeffs(span: LinearSpan, coeffs: Sequence[float]) -> np.ndarray:
    a = np.asarray(coeffs, dtype=float)
    if a.shape != (span.dim,):
        raise DimensionMismatch(
            f"coefficient vector has shape {a.shape}, span has dimension {span.dim}"
        )
    return a


def evaluate(span: LinearSpan, coeffs: Sequence[float]) -> np.ndarray:
    """Tabulate the span member with the given coefficients on every state."""
    a = _check_coeffs(span, coeffs)
    return a @ span.basis


def oscillation(span: LinearSpan, coeffs: Sequence[float], subset: Iterable[int]) -> float:
    """Oscillation of a span member: global max minus min over ``subset``.

    Nonnegative, invariant under adding constants, positively homogeneous.
    """
    u = sorted(set(int(i) for i in subset))
    if not u:
        raise EmptySubset("oscillation needs a nonempty state subset")
    if u[0] < 0 or u[-1] >= span.num_states:
        raise ValidationError(f"subset indices out of range [0, {span.num_states})")
    phi = evaluate(span, coeffs)
    return float(np.max(phi) - np.min(phi[u]))


def constants_residual(span: LinearSpan) -> float:
    """Max-norm residual of the least-squares fit of the all-ones function."""
    ones = np.ones(span.num_states)
    sol, *_ = np.linalg.lstsq(span.basis.T, ones, rcond=None)
    return float(np.max(np.abs(span.basis.T @ sol - ones)))


def contains_constants(span: LinearSpan, tol: float = CONSTANTS_TOL) -> bool:
    """Whether the constant function lies in the span (within ``tol``)."""
    return constants_residual(span) <= tol
