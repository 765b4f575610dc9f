"""Concrete families: sign cubes, Walsh spans, and edge-indexed graph models.

Each constructor returns plain package types (state spaces, spans, density
tables) so the generic LP/Newton machinery applies unchanged, plus the
combinatorial existence criteria and closed-form probabilities that make
these families cheap to study at scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import expit

from .errors import InvalidOrder, MixedSizes, SpaceTooLarge, ValidationError
from .expfam import DensityTable, density_from_phi
from .linspan import LinearSpan, build_span
from .statespace import StateSpace, build_space

__all__ = [
    "CubeSpace",
    "GraphSpace",
    "GraphParams",
    "cube_space",
    "full_span",
    "rademacher_span",
    "walsh_span",
    "rademacher_exists",
    "parity_exists",
    "graph_space",
    "graph_params",
    "graph_family",
    "graph_exists",
    "sample_graph",
    "edge_probabilities",
    "exists_probability_rademacher",
    "exists_probability_graphs",
    "eisenberg_bounds",
    "coupon_coverage_probability",
    "RademacherExistence",
]

# Enumerated spaces are capped at 2^20 states.
MAX_ENUMERATED_BITS = 20


@dataclass(frozen=True)
class CubeSpace:
    """All sign vectors of a k-cube, lexicographic with -1 before +1.

    ``signs[i, j]`` is the j-th coordinate of state i; the uniform weight
    2^-k makes coordinate symmetries exact.
    """

    k: int
    space: StateSpace
    signs: np.ndarray


@dataclass(frozen=True)
class GraphSpace:
    """All simple graphs on N labelled nodes, encoded as edge bitmasks.

    Edges are ordered lexicographically as pairs (r, s) with r < s; state i
    is the graph whose edge set is the binary expansion of i, and
    ``masks[i, e]`` says whether edge e is present.  Weights are 1.
    """

    num_nodes: int
    edges: tuple[tuple[int, int], ...]
    space: StateSpace
    masks: np.ndarray

    @property
    def num_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class GraphParams:
    """Per-edge exponent coefficients of the graph family."""

    c: np.ndarray

    @property
    def num_edges(self) -> int:
        return len(self.c)


def cube_space(k: int) -> CubeSpace:
    """Enumerate the k-cube; k is capped to keep 2^k states in memory."""
    if k < 1:
        raise ValidationError("cube dimension must be at least 1")
    if k > MAX_ENUMERATED_BITS:
        raise SpaceTooLarge(
            f"2^{k} states exceed the enumeration cap of 2^{MAX_ENUMERATED_BITS}"
        )
    count = 1 << k
    idx = np.arange(count, dtype=np.int64)
    # Bit (k-1-j) of the index holds coordinate j, so index order is
    # lexicographic order on sign tuples with -1 < +1.
    bits = (idx[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1
    signs = (2 * bits - 1).astype(np.int8)
    labels = [tuple(int(v) for v in row) for row in signs]
    weights = np.full(count, 2.0 ** -k)
    return CubeSpace(k=k, space=build_space(labels, weights), signs=signs)


def full_span(space: StateSpace) -> LinearSpan:
    """The span of every real function: one indicator row per state."""
    return build_span(np.eye(space.size))


def rademacher_span(k: int) -> tuple[CubeSpace, LinearSpan]:
    """Constants plus the k coordinate projections on the sign cube."""
    cube = cube_space(k)
    rows = np.vstack([np.ones(cube.space.size), cube.signs.T.astype(float)])
    return cube, build_span(rows)


def walsh_span(k: int, q: int) -> tuple[CubeSpace, LinearSpan]:
    """All products of at most q distinct coordinate projections.

    Dimension is sum_{j<=q} C(k, j); the generator rows are independent, so
    no generator is dropped.

    Raises:
        InvalidOrder: q outside 1..k.
    """
    if q < 1 or q > k:
        raise InvalidOrder(f"product order q={q} outside 1..{k}")
    cube = cube_space(k)
    signs = cube.signs.astype(float)
    rows = [np.ones(cube.space.size)]
    for size in range(1, q + 1):
        for subset in combinations(range(k), size):
            rows.append(np.prod(signs[:, subset], axis=1))
    return cube, build_span(np.vstack(rows))


def _support_signs(cube: CubeSpace, indices: Iterable[int]) -> np.ndarray:
    support = sorted(set(int(i) for i in indices))
    if not support:
        raise ValidationError("existence criteria need a nonempty sample")
    if support[0] < 0 or support[-1] >= cube.space.size:
        raise ValidationError("sample indices out of range for this cube")
    return cube.signs[support]

def rademacher_exists(cube: CubeSpace, indices: Iterable[int]) -> bool:
    """Combinatorial criterion: every coordinate shows both signs."""
    signs = _support_signs(cube, indices)
    return bool(np.all(signs.max(axis=0) == 1) and np.all(signs.min(axis=0) == -1))


def parity_exists(cube: CubeSpace, indices: Iterable[int]) -> bool:
    """Criterion for products of k-1 projections: a full parity class is hit.

    States split by the parity of their positive-coordinate count; existence
    requires the sample to cover the even class or the odd class entirely.
    """
    support = set(int(i) for i in indices)
    _support_signs(cube, support)  # validation only
    positives = (cube.signs > 0).sum(axis=1)
    even = np.nonzero(positives % 2 == 0)[0]
    odd = np.nonzero(positives % 2 == 1)[0]
    return set(even).issubset(support) or set(odd).issubset(support)


def graph_space(num_nodes: int) -> GraphSpace:
    """Enumerate all graphs on ``num_nodes`` nodes (edge count capped)."""
    if num_nodes < 2:
        raise ValidationError("graphs need at least 2 nodes")
    edges = tuple(combinations(range(num_nodes), 2))
    num_edges = len(edges)
    if num_edges > MAX_ENUMERATED_BITS:
        raise SpaceTooLarge(
            f"{num_edges} edges exceed the enumeration cap of "
            f"{MAX_ENUMERATED_BITS} (use sampling and closed forms instead)"
        )
    count = 1 << num_edges
    idx = np.arange(count, dtype=np.int64)
    masks = ((idx[:, None] >> np.arange(num_edges)[None, :]) & 1).astype(bool)
    labels = [int(i) for i in idx]
    return GraphSpace(
        num_nodes=num_nodes,
        edges=edges,
        space=build_space(labels, np.ones(count)),
        masks=masks,
    )


def graph_params(num_nodes: int, c: float | Sequence[float] = 0.0) -> GraphParams:
    """Coefficients for the graph family; scalars broadcast to every edge."""
    num_edges = num_nodes * (num_nodes - 1) // 2
    arr = np.asarray(c, dtype=float)
    if arr.ndim == 0:
        arr = np.full(num_edges, float(arr))
    if arr.shape != (num_edges,):
        raise ValidationError(
            f"expected {num_edges} edge coefficients, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError("edge coefficients must be finite")
    return GraphParams(c=arr)


def graph_span(gspace: GraphSpace) -> LinearSpan:
    """Constants plus one +/-1 edge-indicator contrast per edge."""
    chi = 1.0 - 2.0 * gspace.masks.astype(float)
    return build_span(np.vstack([np.ones(gspace.space.size), chi.T]))


def graph_family(
    num_nodes: int, params: GraphParams
) -> tuple[GraphSpace, LinearSpan, DensityTable]:
    """Exponential family over all graphs with per-edge coefficients.

    The exponent of a graph is the sum of its present edges' coefficients,
    which makes the edge marginals exp(c)/(1+exp(c)) and distinct edges
    independent.
    """
    gspace = graph_space(num_nodes)
    if params.num_edges != gspace.num_edges:
        raise ValidationError(
            f"params carry {params.num_edges} edges, space has {gspace.num_edges}"
        )
    phi = gspace.masks.astype(float) @ params.c
    table = density_from_phi(gspace.space, phi)
    return gspace, graph_span(gspace), table


def _as_mask_matrix(graphs: Sequence, num_edges: Optional[int]) -> np.ndarray:
    rows = []
    for g in graphs:
        if isinstance(g, (int, np.integer)):
            if num_edges is None:
                raise ValidationError(
                    "integer graph masks need num_edges to be specified"
                )
            bits = (int(g) >> np.arange(num_edges)) & 1
            rows.append(bits.astype(bool))
        else:
            rows.append(np.asarray(g, dtype=bool))
    if not rows:
        raise ValidationError("need at least one graph")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1 or (num_edges is not None and lengths != {num_edges}):
        raise MixedSizes(f"graphs disagree on edge count: {sorted(lengths)}")
    return np.vstack(rows)


def graph_exists(graphs: Sequence, num_edges: Optional[int] = None) -> bool:
    """Criterion for graph samples: union complete, intersection empty.

    Accepts edge-presence boolean vectors or integer bitmasks (the latter
    need ``num_edges``).
    """
    masks = _as_mask_matrix(graphs, num_edges)
    union_full = bool(masks.any(axis=0).all())
    intersection_empty = bool(~masks.all(axis=0).any())
    return union_full and intersection_empty


def edge_probabilities(params: GraphParams) -> np.ndarray:
    """Marginal presence probability of each edge: exp(c)/(1+exp(c))."""
    return expit(params.c)


def sample_graph(
    num_nodes: int, params: GraphParams, rng: np.random.Generator
) -> np.ndarray:
    """Draw one graph as an edge-presence vector; no enumeration involved.

    Each edge is included independently with its marginal probability, which
    reproduces the family's law exactly, so this scales to large node counts.
    """
    expected = num_nodes * (num_nodes - 1) // 2
    if params.num_edges != expected:
        raise ValidationError(
            f"params carry {params.num_edges} edges, {num_nodes} nodes have {expected}"
        )
    probs = edge_probabilities(params)
    return rng.random(len(probs)) < probs


class RademacherExistence(NamedTuple):
    probability: float
    bernoulli_lower_bound: float


def exists_probability_rademacher(k: int, n: int) -> RademacherExistence:
    """Closed-form existence probability (1 - 2^(1-n))^k for uniform draws.

    Also reports the Bernoulli-inequality lower bound 1 - k*2^(1-n).
    """
    if k < 1 or n < 1:
        raise ValidationError("need k >= 1 and n >= 1")
    miss = 2.0 ** (1 - n)
    return RademacherExistence(
        probability=float((1.0 - miss) ** k),
        bernoulli_lower_bound=float(1.0 - k * miss),
    )


def exists_probability_graphs(n: int, params: GraphParams) -> float:
    """Closed-form existence probability: prod_e (1 - p_e^n - (1-p_e)^n)."""
    if n < 1:
        raise ValidationError("need n >= 1")
    p = edge_probabilities(params)
    return float(np.prod(1.0 - p**n - (1.0 - p) ** n))


def eisenberg_bounds(k: int) -> tuple[float, float]:
    """Two-sided bounds on the mean stopping time for k coordinate pairs.

    The mean of max over k independent both-signs waiting times lies in
    [H_k/log 2 + 1, H_k/log 2 + 2), H_k the k-th harmonic number.
    """
    if k < 1:
        raise ValidationError("need k >= 1")
    harmonic = sum(1.0 / i for i in range(1, k + 1))
    base = harmonic / math.log(2.0)
    return (base + 1.0, base + 2.0)


def coupon_coverage_probability(
    num_states: int, num_draws: int, num_targets: Optional[int] = None
) -> float:
    """P(a fixed set of ``num_targets`` states is fully hit by uniform draws).

    Exact inclusion-exclusion, in rational arithmetic up to a draw-count cap
    and in compensated floating point beyond it.  ``num_targets`` defaults
    to all states (the classical full-coverage probability).
    """
    k = num_states
    m = k if num_targets is None else num_targets
    n = num_draws
    if k < 1 or m < 0 or m > k or n < 0:
        raise ValidationError("invalid coupon-coverage arguments")
    if m == 0:
        return 1.0
    if n < m:
        return 0.0
    if n <= 20_000:
        total = Fraction(0)
        for j in range(m + 1):
            total += (-1) ** j * math.comb(m, j) * Fraction(k - j, k) ** n
        return float(min(max(total, Fraction(0)), Fraction(1)))
    terms = [
        (-1) ** j * math.comb(m, j) * (1.0 - j / k) ** n for j in range(m + 1)
    ]
    return float(min(max(math.fsum(terms), 0.0), 1.0))
