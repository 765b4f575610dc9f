"""Existence-gated maximum likelihood for finite exponential families.

``fit`` first certifies whether a genuine maximizer exists (the sample
support must pin down the span's nonnegative cone).  If it does, a damped
Newton ascent on the constant-quotiented basis finds it.  If not, the
supremum is only approached "at infinity": the family is restricted to the
closure of the support, where a genuine maximizer exists and attains the
original supremum exactly, provided the restricted weights are kept
unrenormalized.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from . import uniqueness
from .errors import CalledOnUniquenessSet, DimensionMismatch, SolverDivergence, ValidationError
from .expfam import DensityTable
from .linspan import LinearSpan, build_span, contains_constants, evaluate
from .statespace import Sample, StateSpace, build_space, make_sample

__all__ = ["MleKind", "MleResult", "fit", "check_exists", "reduced_family"]

ARMIJO_SLOPE = 1e-4
ARMIJO_MAX_HALVINGS = 60
DAMPING_INITIAL = 1e-6
DAMPING_GROWTH = 10.0
DAMPING_LIMIT = 1e12
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500


class MleKind(Enum):
    EXISTS = "exists"
    REDUCED = "reduced"


@dataclass(frozen=True)
class MleResult:
    """Outcome of a fit.

    ``kind`` is EXISTS when the maximizer lives in the original family; then
    ``density`` covers the full space and ``support`` lists every state.
    Otherwise ``kind`` is REDUCED: ``density`` covers only the closure of
    the sample support (indices in ``support``, against the original space),
    and ``log_likelihood_sup`` still equals the supremum over the original
    family.  ``coefficients`` refer to the span actually optimized (the
    original one, or the restricted one from ``reduced_family``).
    """

    kind: MleKind
    density: DensityTable
    coefficients: np.ndarray
    support: tuple[int, ...]
    log_likelihood_sup: float
    iterations: int
    moment_residual: float


def check_exists(space: StateSpace, span: LinearSpan, sample: Sample) -> bool:
    """Whether a genuine maximum likelihood density exists for this sample."""
    _check_shapes(space, span)
    return uniqueness.is_set_of_uniqueness(span, sample.support)


def reduced_family(
    space: StateSpace, span: LinearSpan, sample: Sample
) -> tuple[StateSpace, LinearSpan]:
    """Restrict the family to the closure of a non-uniqueness support.

    The restricted weights are deliberately *not* renormalized: that choice
    makes the restricted supremum equal the original one on the nose.  The
    restricted span's ``kept_rows`` indexes rows of the original basis, so
    restricted coefficients lift back to the full space.

    Raises:
        CalledOnUniquenessSet: the sample support is of uniqueness, so no
            reduction is called for.
    """
    _check_shapes(space, span)
    report = uniqueness.closure(span, sample.support)
    if report.is_uniqueness:
        raise CalledOnUniquenessSet(
            "sample support is a set of uniqueness; the genuine MLE exists"
        )
    return _restrict(space, span, sorted(report.closure))


def fit(
    space: StateSpace,
    span: LinearSpan,
    sample: Sample,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    init: Optional[Sequence[float]] = None,
    callback: Optional[Callable[[int, float, float], None]] = None,
) -> MleResult:
    """Maximize the likelihood, reducing the family first if necessary.

    Args:
        tol: max-norm bound on the basis moment residual at return.
        max_iter: Newton iteration budget.
        init: optional starting coefficients (in the span being optimized);
            the default start is the zero vector.
        callback: called as ``callback(iteration, log_likelihood, residual)``
            after every accepted ascent step.

    Raises:
        SolverDivergence: the residual did not reach ``tol`` in budget.
    """
    _check_shapes(space, span)
    if not contains_constants(span):
        raise ValidationError(
            "exponential-family spans must contain the constant function"
        )
    report = uniqueness.closure(span, sample.support)
    if report.is_uniqueness:
        coeffs, table, loglik, iters, residual = _newton_ascent(
            space, span, sample, tol, max_iter, init, callback
        )
        support = tuple(range(space.size))
        kind = MleKind.EXISTS
    else:
        closure_sorted = sorted(report.closure)
        rspace, rspan = _restrict(space, span, closure_sorted)
        position = {orig: j for j, orig in enumerate(closure_sorted)}
        rsample = make_sample(rspace, [position[i] for i in sample.indices])
        coeffs, table, loglik, iters, residual = _newton_ascent(
            rspace, rspan, rsample, tol, max_iter, init, callback
        )
        support = tuple(closure_sorted)
        kind = MleKind.REDUCED
    return MleResult(
        kind=kind,
        density=table,
        coefficients=coeffs,
        support=support,
        log_likelihood_sup=loglik,
        iterations=iters,
        moment_residual=residual,
    )


def _check_shapes(space: StateSpace, span: LinearSpan) -> None:
    if span.num_states != space.size:
        raise DimensionMismatch(
            f"span tabulated on {span.num_states} states, space has {space.size}"
        )


def _restrict(
    space: StateSpace, span: LinearSpan, keep: list[int]
) -> tuple[StateSpace, LinearSpan]:
    rspace = build_space(
        [space.labels[i] for i in keep], space.weights[keep]
    )
    rspan = build_span(span.basis[:, keep])
    return rspace, rspan


def _working_rows(span: LinearSpan) -> np.ndarray:
    """Orthonormal basis of the span's row space modulo constants.

    Row-centering removes the constant direction (the density is invariant
    to it and it makes the covariance singular); SVD re-extracts an
    orthonormal spanning set of what remains.
    """
    centered = span.basis - span.basis.mean(axis=1, keepdims=True)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, span.num_states))
    rank = int(np.sum(s > 1e-12 * s[0]))
    return vt[:rank]


def _newton_ascent(
    space: StateSpace,
    span: LinearSpan,
    sample: Sample,
    tol: float,
    max_iter: int,
    init: Optional[Sequence[float]],
    callback: Optional[Callable[[int, float, float], None]],
) -> tuple[np.ndarray, DensityTable, float, int, float]:
    n = sample.size
    idx = np.fromiter(sample.indices, dtype=int)
    basis = span.basis
    sample_mean_orig = basis[:, idx].mean(axis=1)

    rows = _working_rows(span)
    r = rows.shape[0]
    sample_mean_w = rows[:, idx].mean(axis=1) if r else np.zeros(0)
    log_mu = space.log_weights

    def state(t: np.ndarray):
        phi = t @ rows if r else np.zeros(space.size)
        shifted = phi + log_mu
        psi = float(logsumexp(shifted))
        prob = np.exp(shifted - psi)
        objective = float(phi[idx].mean() - psi)  # per-observation log-lik
        return phi, psi, prob, objective

    t = np.zeros(r)
    if init is not None:
        phi0 = evaluate(span, init)
        t = rows @ phi0 if r else t

    phi, psi, prob, objective = state(t)
    residual = float(np.max(np.abs(sample_mean_orig - basis @ prob)))
    iterations = 0
    damping = 0.0

    while residual > tol:
        if iterations >= max_iter:
            raise SolverDivergence(
                f"moment residual {residual:.3e} above tolerance {tol:.1e} "
                f"after {iterations} iterations"
            )
        grad = sample_mean_w - rows @ prob
        centered_sq = (rows * prob) @ rows.T
        ew = rows @ prob
        cov = centered_sq - np.outer(ew, ew)

        accepted = False
        while not accepted:
            try:
                step = np.linalg.solve(cov + damping * np.eye(r), grad)
            except np.linalg.LinAlgError:
                step = None
            slope = float(grad @ step) if step is not None else -1.0
            if step is not None and slope > 0.0:
                alpha = 1.0
                for _ in range(ARMIJO_MAX_HALVINGS + 1):
                    _, _, _, trial_obj = state(t + alpha * step)
                    if trial_obj >= objective + ARMIJO_SLOPE * alpha * slope:
                        t = t + alpha * step
                        accepted = True
                        break
                    alpha *= 0.5
            if not accepted:
                damping = DAMPING_INITIAL if damping == 0.0 else damping * DAMPING_GROWTH
                if damping > DAMPING_LIMIT:
                    raise SolverDivergence(
                        "line search stalled even under maximal damping"
                    )
        damping = 0.0
        iterations += 1
        phi, psi, prob, objective = state(t)
        residual = float(np.max(np.abs(sample_mean_orig - basis @ prob)))
        if callback is not None:
            callback(iterations, n * objective, residual)

    log_p = phi - psi
    table = DensityTable(values=np.exp(log_p), log_values=log_p)
    coeffs, *_ = np.linalg.lstsq(basis.T, phi, rcond=None)
    return coeffs, table, n * objective, iterations, residual
