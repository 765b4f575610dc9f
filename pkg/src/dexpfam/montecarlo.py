"""Monte Carlo estimation of existence probabilities and stopping times.

Reproducibility contract: replicate ``i`` of an experiment with master seed
``s`` draws from ``numpy.random.Philox(key=[s, i])`` and from nothing else.
Streams are therefore independent of execution order and of how many
replicates run in parallel; a sweep offsets the master seed by the point
index.  This scheme is part of the public interface and must not change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator, Optional, Union

import numpy as np

from . import families, uniqueness
from .errors import BudgetExceeded, ValidationError

__all__ = [
    "FullFamily",
    "RademacherFamily",
    "WalshFamily",
    "GraphFamily",
    "ExperimentConfig",
    "ExperimentSummary",
    "SweepRow",
    "replicate_rng",
    "estimate_existence_probability",
    "estimate_nu_uniq",
    "threshold_sweep",
]

_MASK64 = (1 << 64) - 1
_FIRST_BATCH = 64


@dataclass(frozen=True)
class FullFamily:
    """Richest span on ``num_states`` states; existence = full coverage."""

    num_states: int


@dataclass(frozen=True)
class RademacherFamily:
    """Constants + coordinate projections on the k-cube."""

    k: int


@dataclass(frozen=True)
class WalshFamily:
    """Products of at most q projections on the k-cube.

    q = k and q = k-1 have fast combinatorial criteria; in between, each
    sample is certified by the LP route over the enumerated cube.
    """

    k: int
    q: int


@dataclass(frozen=True)
class GraphFamily:
    """Edge-exponent graph family on ``num_nodes`` nodes.

    ``c`` is a scalar broadcast to all edges or a per-edge tuple.
    """

    num_nodes: int
    c: Union[float, tuple[float, ...]] = 0.0


FamilySpec = Union[FullFamily, RademacherFamily, WalshFamily, GraphFamily]


@dataclass(frozen=True)
class ExperimentConfig:
    """One estimation task: family, estimator, sizes, replicates, seed."""

    family: FamilySpec
    estimator: str = "existence"  # "existence" | "nu-mean" | "nu-tail"
    sample_size: Optional[int] = None
    tail_threshold: Optional[float] = None
    replicates: int = 100_000
    seed: int = 0
    max_draws: int = 10_000_000

    def __post_init__(self):
        if self.replicates < 1:
            raise ValidationError("need at least one replicate")
        if self.estimator not in ("existence", "nu-mean", "nu-tail"):
            raise ValidationError(f"unknown estimator: {self.estimator!r}")
        if self.estimator == "existence":
            if self.sample_size is None or self.sample_size < 1:
                raise ValidationError("existence estimation needs sample_size >= 1")
        if self.estimator == "nu-tail" and self.tail_threshold is None:
            raise ValidationError("nu-tail estimation needs tail_threshold")


@dataclass(frozen=True)
class ExperimentSummary:
    """Point estimate with its error bar and optional analytic reference."""

    family: str
    size: int
    estimator: str
    sample_size: Optional[int]
    replicates: int
    estimate: float
    stderr: float
    reference: Optional[float]
    zscore: Optional[float]


@dataclass(frozen=True)
class SweepRow:
    multiplier: float
    summary: ExperimentSummary


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """The only stream replicate ``index`` may draw from (see module doc)."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ---------------------------------------------------------------------------
# Family plumbing: labels, sizes, draws, criteria
# ---------------------------------------------------------------------------


def _label(family: FamilySpec) -> str:
    return {
        FullFamily: "full",
        RademacherFamily: "rademacher",
        WalshFamily: "walsh",
        GraphFamily: "graph",
    }[type(family)]


def _size(family: FamilySpec) -> int:
    if isinstance(family, FullFamily):
        return family.num_states
    if isinstance(family, RademacherFamily):
        return family.k
    if isinstance(family, WalshFamily):
        return family.k
    return family.num_nodes


def _graph_params(family: GraphFamily) -> families.GraphParams:
    return families.graph_params(family.num_nodes, family.c)


class _Criterion:
    """Per-family draw + incremental stopping-time machinery.

    ``draw`` produces a batch of i.i.d. observations from the replicate's
    stream, ``update`` folds a batch into running state and reports the
    1-based index at which the criterion first held, or None.
    """

    def __init__(self, family: FamilySpec):
        self.family = family
        if isinstance(family, FullFamily):
            if family.num_states < 1:
                raise ValidationError("need at least one state")
            self._mode = "coverage"
            self.num_states = family.num_states
        elif isinstance(family, RademacherFamily):
            if family.k < 1:
                raise ValidationError("need k >= 1")
            self._mode = "signs"
        elif isinstance(family, WalshFamily):
            k, q = family.k, family.q
            if not (1 <= q <= k):
                raise ValidationError("need 1 <= q <= k")
            if q == k:
                self._mode = "coverage"
                self.num_states = 1 << k
            elif q == k - 1 and k >= 2:
                self._mode = "parity"
                self.num_states = 1 << k
            else:
                self._mode = "lp"
                self.num_states = 1 << k
                _, self._span = families.walsh_span(k, q)
        elif isinstance(family, GraphFamily):
            self._mode = "edges"
            self.edge_probs = families.edge_probabilities(_graph_params(family))
        else:
            raise ValidationError(f"unknown family spec: {family!r}")

    @property
    def has_fast_criterion(self) -> bool:
        return self._mode != "lp"

    def draw(self, rng: np.random.Generator, count: int):
        if self._mode in ("coverage", "parity", "lp"):
            return rng.integers(0, self.num_states, size=count)
        if self._mode == "signs":
            return rng.integers(0, 2, size=(count, self.family.k), dtype=np.int8)
        return rng.random((count, len(self.edge_probs))) < self.edge_probs

    def exists(self, draws) -> bool:
        if self._mode == "coverage":
            return len(np.unique(draws)) == self.num_states
        if self._mode == "parity":
            seen = np.unique(draws)
            even = np.bitwise_count(seen.astype(np.uint64)) % 2 == 0
            counts = (int(even.sum()), int(len(seen) - even.sum()))
            return counts[0] == self._parity_targets[0] or counts[1] == self._parity_targets[1]
        if self._mode == "lp":
            return uniqueness.is_set_of_uniqueness(self._span, np.unique(draws))
        if self._mode == "signs":
            return bool(
                np.all(draws.max(axis=0) == 1) and np.all(draws.min(axis=0) == 0)
            )
        present = draws.any(axis=0).all()
        absent = (~draws).any(axis=0).all()
        return bool(present and absent)

    @property
    def _parity_targets(self) -> tuple[int, int]:
        # Even/odd class sizes under popcount of the state index.
        half = self.num_states // 2
        return (half, half)

    def fresh_state(self):
        if self._mode == "coverage":
            return {"seen": np.zeros(self.num_states, dtype=bool), "count": 0}
        if self._mode == "parity":
            return {
                "seen": np.zeros(self.num_states, dtype=bool),
                "even": 0,
                "odd": 0,
            }
        if self._mode == "signs":
            k = self.family.k
            return {"plus": np.zeros(k, dtype=bool), "minus": np.zeros(k, dtype=bool)}
        if self._mode == "edges":
            e = len(self.edge_probs)
            return {"present": np.zeros(e, dtype=bool), "absent": np.zeros(e, dtype=bool)}
        raise ValidationError(
            "stopping times need a combinatorial criterion; this family "
            "only supports fixed-sample existence estimation via the LP route"
        )

    def update(self, state, draws, offset: int) -> Optional[int]:
        """Fold a batch in; return the 1-based global stopping index if hit."""
        if self._mode == "coverage":
            vals, first = np.unique(draws, return_index=True)
            fresh = ~state["seen"][vals]
            vals, first = vals[fresh], first[fresh]
            if state["count"] + len(vals) >= self.num_states:
                needed = self.num_states - state["count"]
                stop = int(np.sort(first)[needed - 1])
                return offset + stop + 1
            state["seen"][vals] = True
            state["count"] += len(vals)
            return None
        if self._mode == "parity":
            vals, first = np.unique(draws, return_index=True)
            fresh = ~state["seen"][vals]
            vals, first = vals[fresh], first[fresh]
            order = np.argsort(first, kind="stable")
            target_even, target_odd = self._parity_targets
            for v, pos in zip(vals[order], first[order]):
                state["seen"][v] = True
                if int(np.bitwise_count(np.uint64(v))) % 2 == 0:
                    state["even"] += 1
                    if state["even"] == target_even:
                        return offset + int(pos) + 1
                else:
                    state["odd"] += 1
                    if state["odd"] == target_odd:
                        return offset + int(pos) + 1
            return None
        if self._mode == "signs":
            plus = np.maximum.accumulate(draws, axis=0).astype(bool) | state["plus"]
            minus = np.maximum.accumulate(1 - draws, axis=0).astype(bool) | state["minus"]
            done = (plus & minus).all(axis=1)
            if done.any():
                return offset + int(np.argmax(done)) + 1
            state["plus"], state["minus"] = plus[-1], minus[-1]
            return None
        present = np.maximum.accumulate(draws, axis=0) | state["present"]
        absent = np.maximum.accumulate(~draws, axis=0) | state["absent"]
        done = (present & absent).all(axis=1)
        if done.any():
            return offset + int(np.argmax(done)) + 1
        state["present"], state["absent"] = present[-1], absent[-1]
        return None

    def reference_existence(self, n: int) -> Optional[float]:
        fam = self.family
        if isinstance(fam, FullFamily):
            return families.coupon_coverage_probability(fam.num_states, n)
        if isinstance(fam, RademacherFamily):
            return families.exists_probability_rademacher(fam.k, n).probability
        if isinstance(fam, WalshFamily):
            if fam.q == fam.k:
                return families.coupon_coverage_probability(1 << fam.k, n)
            if fam.q == fam.k - 1:
                total = 1 << fam.k
                one_class = families.coupon_coverage_probability(total, n, total // 2)
                both = families.coupon_coverage_probability(total, n)
                return min(1.0, max(0.0, 2.0 * one_class - both))
            return None
        return families.exists_probability_graphs(n, _graph_params(fam))


def _batches(criterion: _Criterion, rng: np.random.Generator, budget: int) -> Iterator:
    """Deterministic draw schedule shared by simulation and test re-scans."""
    drawn, size = 0, _FIRST_BATCH
    while drawn < budget:
        count = min(size, budget - drawn)
        yield criterion.draw(rng, count)
        drawn += count
        size *= 2


def _nu_single(criterion: _Criterion, rng: np.random.Generator, budget: int) -> int:
    state = criterion.fresh_state()
    offset = 0
    for batch in _batches(criterion, rng, budget):
        hit = criterion.update(state, batch, offset)
        if hit is not None:
            return hit
        offset += len(batch)
    raise BudgetExceeded(
        f"criterion unmet after {budget} draws; family spec likely inconsistent"
    )


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def estimate_existence_probability(cfg: ExperimentConfig) -> ExperimentSummary:
    """Fraction of replicates whose i.i.d. sample admits a genuine MLE."""
    if cfg.estimator != "existence":
        raise ValidationError("config estimator must be 'existence'")
    criterion = _Criterion(cfg.family)
    n = int(cfg.sample_size)
    hits = 0
    for i in range(cfg.replicates):
        rng = replicate_rng(cfg.seed, i)
        hits += criterion.exists(criterion.draw(rng, n))
    estimate = hits / cfg.replicates
    stderr = math.sqrt(estimate * (1.0 - estimate) / cfg.replicates)
    reference = criterion.reference_existence(n)
    zscore = None
    if reference is not None and stderr > 0:
        zscore = (estimate - reference) / stderr
    return ExperimentSummary(
        family=_label(cfg.family),
        size=_size(cfg.family),
        estimator=cfg.estimator,
        sample_size=n,
        replicates=cfg.replicates,
        estimate=estimate,
        stderr=stderr,
        reference=reference,
        zscore=zscore,
    )


def estimate_nu_uniq(cfg: ExperimentConfig) -> ExperimentSummary:
    """Mean of the uniqueness stopping time, or the tail P(nu < t)."""
    if cfg.estimator not in ("nu-mean", "nu-tail"):
        raise ValidationError("config estimator must be 'nu-mean' or 'nu-tail'")
    criterion = _Criterion(cfg.family)
    values = np.empty(cfg.replicates)
    for i in range(cfg.replicates):
        rng = replicate_rng(cfg.seed, i)
        values[i] = _nu_single(criterion, rng, cfg.max_draws)
    if cfg.estimator == "nu-mean":
        estimate = float(values.mean())
        spread = float(values.std(ddof=1)) if cfg.replicates > 1 else 0.0
        stderr = spread / math.sqrt(cfg.replicates)
    else:
        indicator = values < float(cfg.tail_threshold)
        estimate = float(indicator.mean())
        stderr = math.sqrt(estimate * (1.0 - estimate) / cfg.replicates)
    return ExperimentSummary(
        family=_label(cfg.family),
        size=_size(cfg.family),
        estimator=cfg.estimator,
        sample_size=None,
        replicates=cfg.replicates,
        estimate=estimate,
        stderr=stderr,
        reference=None,
        zscore=None,
    )


def _threshold_base(family: FamilySpec) -> float:
    if isinstance(family, FullFamily):
        k = family.num_states
        return k * math.log(k) if k > 1 else 1.0
    if isinstance(family, RademacherFamily):
        return math.log2(family.k) if family.k > 1 else 1.0
    if isinstance(family, WalshFamily):
        total = 1 << family.k
        if family.q == family.k:
            return total * math.log(total)
        return family.k * total
    return math.log(family.num_nodes)


def threshold_sweep(cfg: ExperimentConfig, multipliers) -> list[SweepRow]:
    """Existence probability along n = ceil(m * base) for each multiplier m.

    The base scale is the family's threshold function (coverage scale for
    the richest spans, log2 k for coordinate spans, k*2^k for the parity
    span, log N for graphs).  Sweep point p uses master seed ``seed + p``.
    """
    base = _threshold_base(cfg.family)
    rows = []
    for point, mult in enumerate(multipliers):
        n = max(1, math.ceil(mult * base))
        point_cfg = replace(
            cfg, estimator="existence", sample_size=n, seed=cfg.seed + point
        )
        rows.append(SweepRow(multiplier=float(mult), summary=estimate_existence_probability(point_cfg)))
    return rows
