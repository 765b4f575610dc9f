"""Exponential densities on a finite state space, evaluated stably.

Everything routes through log-sum-exp: the fitted exponents can be large
once a sample sits near the existence boundary, and naive exponentials
overflow long before the math stops making sense.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DimensionMismatch, NonFiniteInput
from .linspan import LinearSpan, evaluate
from .statespace import Sample, StateSpace

__all__ = [
    "DensityTable",
    "log_partition",
    "density",
    "log_likelihood",
    "moments",
]


@dataclass(frozen=True)
class DensityTable:
    """Tabulated exponential density: values p(x) > 0 with sum p*mu = 1."""

    values: np.ndarray
    log_values: np.ndarray

    @property
    def size(self) -> int:
        return len(self.values)


def _checked_phi(space: StateSpace, phi: Sequence[float]) -> np.ndarray:
    arr = np.asarray(phi, dtype=float)
    if arr.shape != (space.size,):
        raise DimensionMismatch(
            f"exponent table has shape {arr.shape}, space has {space.size} states"
        )
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("exponent values must be finite")
    return arr


def log_partition(space: StateSpace, phi: Sequence[float]) -> float:
    """log of sum_x exp(phi(x)) * mu(x), computed by log-sum-exp."""
    arr = _checked_phi(space, phi)
    return float(logsumexp(arr + space.log_weights))


def density_from_phi(space: StateSpace, phi: Sequence[float]) -> DensityTable:
    """Exponential density exp(phi - log_partition(phi)) as a table."""
    arr = _checked_phi(space, phi)
    log_p = arr - log_partition(space, arr)
    return DensityTable(values=np.exp(log_p), log_values=log_p)


def density(space: StateSpace, span: LinearSpan, coeffs: Sequence[float]) -> DensityTable:
    """Density of the span member with the given coefficients."""
    if span.num_states != space.size:
        raise DimensionMismatch(
            f"span tabulated on {span.num_states} states, space has {space.size}"
        )
    return density_from_phi(space, evaluate(span, coeffs))


def log_likelihood(
    space: StateSpace, span: LinearSpan, coeffs: Sequence[float], sample: Sample
) -> float:
    """n * (sample mean of phi - log_partition(phi)); equals sum_i log p(x_i)."""
    if span.num_states != space.size:
        raise DimensionMismatch(
            f"span tabulated on {span.num_states} states, space has {space.size}"
        )
    phi = _checked_phi(space, evaluate(span, coeffs))
    idx = np.fromiter(sample.indices, dtype=int)
    return float(sample.size * (phi[idx].mean() - log_partition(space, phi)))


def moments(
    space: StateSpace, span: LinearSpan, coeffs: Sequence[float]
) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and covariance matrix of the basis under the density.

    Expectations are exact weighted sums over the (finite) state space.  The
    covariance is symmetric positive semidefinite; any coefficient direction
    representing a constant function sits in its kernel.
    """
    table = density(space, span, coeffs)
    prob = table.values * space.weights  # probabilities, sum to 1
    mean = span.basis @ prob
    second = (span.basis * prob) @ span.basis.T
    cov = second - np.outer(mean, mean)
    return mean, 0.5 * (cov + cov.T)
