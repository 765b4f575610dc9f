import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dexpfam import (
    build_span,
    closure,
    contains_constants,
    evaluate,
    is_set_of_uniqueness,
    oscillation,
    rademacher_span,
)
from dexpfam.errors import DimensionMismatch, EmptySubset, NonFiniteInput, ValidationError
from dexpfam.linspan import constants_residual


def test_redundant_generators_are_reduced():
    # Half-cube indicators generate the same span as constants + projections.
    cube, span = rademacher_span(2)
    ones = np.ones(4)
    gens = []
    for j in range(2):
        r = cube.signs[:, j].astype(float)
        gens += [(ones + r) / 2, (ones - r) / 2]
    reduced = build_span(np.vstack(gens))
    assert reduced.dim == 3
    assert reduced.kept_rows == (0, 1, 2)
    # same row space: every original basis row fits with zero residual
    sol, res, *_ = np.linalg.lstsq(reduced.basis.T, span.basis.T, rcond=None)
    fit = reduced.basis.T @ sol
    np.testing.assert_allclose(fit, span.basis.T, atol=1e-12)


def test_build_span_rejects_junk():
    with pytest.raises(ValidationError):
        build_span(np.zeros((2, 3)))
    with pytest.raises(NonFiniteInput):
        build_span([[1.0, np.nan]])


def test_evaluate_zero_coefficients():
    _, span = rademacher_span(2)
    np.testing.assert_array_equal(evaluate(span, np.zeros(span.dim)), np.zeros(4))


def test_evaluate_constant_span():
    span = build_span([np.ones(5)])
    np.testing.assert_allclose(evaluate(span, [3.5]), np.full(5, 3.5))


def test_evaluate_rademacher_coordinate():
    # k=1: coefficients (0, 1) pick out the coordinate projection (-1, +1).
    cube, span = rademacher_span(1)
    np.testing.assert_allclose(evaluate(span, [0.0, 1.0]), [-1.0, 1.0])
    assert cube.space.labels == ((-1,), (1,))


def test_evaluate_shape_check():
    _, span = rademacher_span(2)
    with pytest.raises(DimensionMismatch):
        evaluate(span, [1.0])


def test_oscillation_constant_is_zero():
    _, span = rademacher_span(2)
    for subset in ([0], [1, 2], [0, 1, 2, 3]):
        assert oscillation(span, [2.0, 0.0, 0.0], subset) == 0.0


def test_oscillation_indicator():
    space_size = 4
    span = build_span(np.eye(space_size))
    coeffs = np.zeros(space_size)
    coeffs[2] = 1.0  # the indicator of state 2
    assert oscillation(span, coeffs, [0, 1, 3]) == 1.0


def test_oscillation_empty_subset():
    _, span = rademacher_span(1)
    with pytest.raises(EmptySubset):
        oscillation(span, [0.0, 0.0], [])


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=25, deadline=None)
def test_oscillation_translation_invariance(seed):
    rng = np.random.default_rng(seed)
    _, span = rademacher_span(3)
    coeffs = rng.normal(size=span.dim)
    shift = rng.normal() * 5
    shifted = coeffs.copy()
    shifted[0] += shift  # row 0 is the constant function
    subset = rng.choice(8, size=rng.integers(1, 9), replace=False)
    np.testing.assert_allclose(
        oscillation(span, coeffs, subset),
        oscillation(span, shifted, subset),
        atol=1e-10,
    )


@given(
    st.integers(min_value=0, max_value=10_000),
    st.floats(min_value=0.0, max_value=20.0),
)
@settings(max_examples=25, deadline=None)
def test_oscillation_homogeneity_and_domination(seed, scale):
    rng = np.random.default_rng(seed)
    _, span = rademacher_span(3)
    coeffs = rng.normal(size=span.dim)
    subset = rng.choice(8, size=rng.integers(1, 9), replace=False)
    lam_u = oscillation(span, coeffs, subset)
    lam_x = oscillation(span, coeffs, range(8))
    assert lam_u >= 0.0
    assert lam_u <= lam_x + 1e-12
    np.testing.assert_allclose(
        oscillation(span, scale * coeffs, subset), scale * lam_u, atol=1e-8
    )


def test_contains_constants_true_cases():
    _, span = rademacher_span(1)
    assert contains_constants(span)
    for k, q in [(1, 1), (3, 1), (3, 2), (4, 4)]:
        from dexpfam import walsh_span

        _, wspan = walsh_span(k, q)
        assert contains_constants(wspan)


def test_contains_constants_false_case():
    # A single coordinate projection on the 1-cube: the best least-squares
    # fit of the constant 1 is the zero function, so the residual is 1.
    span = build_span([[-1.0, 1.0]])
    assert not contains_constants(span)
    np.testing.assert_allclose(constants_residual(span), 1.0, atol=1e-12)


def test_comparability_on_uniqueness_set(piecewise):
    # On the slice {min=0, max=1}, the oscillation over a certified
    # uniqueness set stays away from zero (here the true slice minimum
    # is 1/2); a non-uniqueness set admits a witness with one-sided
    # oscillation zero.
    _, span = piecewise
    uniq = [1, 4]
    assert is_set_of_uniqueness(span, uniq)
    rng = np.random.default_rng(42)
    smallest = np.inf
    for _ in range(2000):
        coeffs = rng.normal(size=span.dim) * rng.choice([0.1, 1.0, 10.0])
        values = evaluate(span, coeffs)
        spread = values.max() - values.min()
        if spread < 1e-9:
            continue
        normalized = (coeffs - 0) / spread
        normalized[0] -= values.min() / spread  # row 0 is the constant
        vals = evaluate(span, normalized)
        assert abs(vals.min()) < 1e-9 and abs(vals.max() - 1) < 1e-9
        smallest = min(smallest, oscillation(span, normalized, uniq))
    assert smallest > 0.05

    non_uniq = [0, 4]
    report = closure(span, non_uniq)
    assert not report.is_uniqueness
    witness = report.witness_delta
    assert oscillation(span, witness, range(5)) > 0.1
    assert oscillation(span, -witness, non_uniq) <= 1e-9
