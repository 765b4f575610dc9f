from itertools import chain, combinations

import numpy as np
import pytest

from dexpfam import (
    build_span,
    closure,
    evaluate,
    full_span,
    is_set_of_uniqueness,
    monotonicity_check,
    rademacher_span,
)
from dexpfam.errors import EmptySubset, ValidationError


def nonempty_subsets(count):
    states = range(count)
    return chain.from_iterable(
        combinations(states, size) for size in range(1, count + 1)
    )


def test_piecewise_verdicts(piecewise):
    _, span = piecewise
    assert is_set_of_uniqueness(span, [1, 4])  # {-1, 2}
    assert not is_set_of_uniqueness(span, [0, 4])  # {-2, 2}


def test_whole_space_is_always_of_uniqueness(piecewise):
    _, span = piecewise
    assert is_set_of_uniqueness(span, range(5))
    _, rspan = rademacher_span(2)
    assert is_set_of_uniqueness(rspan, range(4))


def test_piecewise_closures(piecewise):
    _, span = piecewise
    # {-1} forces the whole left branch; {-2} forces nothing else.
    assert sorted(closure(span, [1]).closure) == [0, 1, 2]
    assert sorted(closure(span, [0]).closure) == [0]


def test_closure_report_invariants(piecewise):
    _, span = piecewise
    report = closure(span, [0, 4])
    assert not report.is_uniqueness
    assert set(report.subset) <= report.closure
    delta = evaluate(span, report.witness_delta)
    closed = sorted(report.closure)
    outside = sorted(set(range(5)) - report.closure)
    assert np.all(delta >= -1e-7)
    assert np.max(np.abs(delta[closed])) <= 1e-7
    assert np.all(delta[outside] >= 0.5)
    for x, coeffs in report.escape_witnesses.items():
        values = evaluate(span, coeffs)
        assert np.all(values >= -1e-7)
        assert abs(values[x] - 1.0) <= 1e-7
        assert np.max(np.abs(values[list(report.subset)])) <= 1e-7


def test_closure_idempotent_and_monotone(piecewise):
    _, span = piecewise
    for subset in nonempty_subsets(5):
        first = closure(span, subset).closure
        again = closure(span, first).closure
        assert again == first
        for extra in range(5):
            bigger = closure(span, set(subset) | {extra}).closure
            assert first <= bigger


def test_monotonicity_exhaustive_rademacher_k3():
    _, span = rademacher_span(3)
    verdict = {
        subset: is_set_of_uniqueness(span, subset)
        for subset in nonempty_subsets(8)
    }
    for subset, is_uniq in verdict.items():
        if not is_uniq:
            continue
        for extra in range(8):
            assert verdict[tuple(sorted(set(subset) | {extra}))]
    # the helper itself must agree on a sample of nested pairs
    rng = np.random.default_rng(0)
    subsets = list(verdict)
    for _ in range(50):
        small = subsets[rng.integers(len(subsets))]
        grow = set(small) | set(rng.choice(8, size=2))
        assert monotonicity_check(span, small, grow)


def test_monotonicity_check_requires_nesting(piecewise):
    _, span = piecewise
    with pytest.raises(ValidationError):
        monotonicity_check(span, [0, 1], [1, 2])


def test_empty_subset_rejected(piecewise):
    _, span = piecewise
    with pytest.raises(EmptySubset):
        closure(span, [])


def test_full_span_closure_is_identity():
    space_size = 6
    span = build_span(np.eye(space_size))
    rng = np.random.default_rng(3)
    for _ in range(10):
        size = int(rng.integers(1, space_size))
        subset = frozenset(rng.choice(space_size, size=size, replace=False).tolist())
        report = closure(span, subset)
        assert report.closure == subset
        assert report.is_uniqueness == (len(subset) == space_size)


def test_halfcube_closure_and_witness_direction():
    # Sample support = positive half-cube in coordinate 1: the closure is
    # that half-cube and the summed witness is a positive multiple of
    # (1 - r_1), i.e. coefficients (c, -c, 0, ..., 0).
    k = 3
    cube, span = rademacher_span(k)
    half = [i for i in range(2**k) if cube.signs[i, 0] == 1]
    report = closure(span, half)
    assert sorted(report.closure) == half
    coeffs = report.witness_delta
    assert coeffs[0] > 0
    np.testing.assert_allclose(coeffs[1], -coeffs[0], atol=1e-9)
    np.testing.assert_allclose(coeffs[2:], 0.0, atol=1e-9)
    np.testing.assert_allclose(coeffs[0], 2.0 ** (k - 2), atol=1e-7)


def test_partial_halfcube_closure_stays_inside():
    k = 3
    cube, span = rademacher_span(k)
    rng = np.random.default_rng(11)
    half = [i for i in range(2**k) if cube.signs[i, 0] == 1]
    for _ in range(5):
        size = int(rng.integers(1, len(half) + 1))
        subset = rng.choice(half, size=size, replace=False).tolist()
        report = closure(span, subset)
        assert report.closure <= set(half)
