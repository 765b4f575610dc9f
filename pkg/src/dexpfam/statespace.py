"""Finite state spaces and observed samples.

A state space is an ordered finite set of labelled states, each carrying a
strictly positive weight.  All numerical code downstream addresses states by
their dense index 0..K-1; labels exist only for I/O.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Sequence

import numpy as np

from .errors import DuplicateLabel, EmptySpace, NonPositiveWeight, ValidationError

__all__ = ["StateSpace", "Sample", "build_space", "make_sample", "sample_support"]


@dataclass(frozen=True)
class StateSpace:
    """Ordered finite state set with positive weights.

    Attributes:
        labels: tuple of unique, hashable state labels.
        weights: float array of per-state weights, all > 0 and finite.
    """

    labels: tuple
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.labels)

    def index_of(self, label: Hashable) -> int:
        """Dense index of a label; raises ValidationError on unknown labels."""
        try:
            return self._index[label]
        except KeyError:
            raise ValidationError(f"unknown state label: {label!r}") from None

    @cached_property
    def _index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def log_weights(self) -> np.ndarray:
        return np.log(self.weights)


@dataclass(frozen=True)
class Sample:
    """An observed sequence of state indices plus its deduplicated support.

    Existence questions depend on the sample only through ``support``;
    the fitted density also depends on multiplicities, hence ``indices``.
    """

    indices: tuple[int, ...]
    support: frozenset[int] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "support", frozenset(self.indices))

    @property
    def size(self) -> int:
        return len(self.indices)


def build_space(labels: Sequence, weights: Sequence[float]) -> StateSpace:
    """Validate and freeze a state space.

    Raises:
        EmptySpace: no states.
        DuplicateLabel: repeated labels.
        NonPositiveWeight: weights <= 0, NaN or infinite.
        ValidationError: length mismatch between labels and weights.
    """
    labels = tuple(labels)
    if len(labels) == 0:
        raise EmptySpace("a state space needs at least one state")
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) != len(labels):
        raise ValidationError(
            f"got {len(labels)} labels but {w.size} weights"
        )
    if len(set(labels)) != len(labels):
        seen, dupes = set(), []
        for lab in labels:
            if lab in seen:
                dupes.append(lab)
            seen.add(lab)
        raise DuplicateLabel(f"duplicate state labels: {dupes}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise NonPositiveWeight("weights must be finite and strictly positive")
    w = w.copy()
    w.flags.writeable = False
    return StateSpace(labels=labels, weights=w)


def make_sample(space: StateSpace, indices: Sequence[int]) -> Sample:
    """Build a validated sample of state indices over ``space``."""
    idx = tuple(int(i) for i in indices)
    if len(idx) == 0:
        raise ValidationError("a sample needs at least one observation")
    bad = [i for i in idx if i < 0 or i >= space.size]
    if bad:
        raise ValidationError(f"sample indices out of range [0, {space.size}): {bad}")
    return Sample(indices=idx)


def sample_support(s: Sample) -> frozenset[int]:
    """The set of distinct states in the sample (order/multiplicity free)."""
    return s.support
