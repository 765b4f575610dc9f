import numpy as np
import pytest

from dexpfam import build_space, build_span, full_span


@pytest.fixture
def two_state():
    """Two states with unit weights and the richest span."""
    space = build_space([0, 1], [1.0, 1.0])
    return space, full_span(space)


@pytest.fixture
def piecewise():
    """Five integer points; functions affine on {-2,-1,0} and on {0,1,2}.

    The classic demonstration that nonnegativity matters: {-1, 2} pins the
    cone down but {-2, 2} does not.
    """
    space = build_space([-2, -1, 0, 1, 2], [1.0] * 5)
    span = build_span(
        [
            [1, 1, 1, 1, 1],
            [-2, -1, 0, 0, 0],
            [0, 0, 0, 1, 2],
        ]
    )
    return space, span


def random_span(rng: np.random.Generator, num_states: int, dim: int):
    """A random span containing constants, with mild dense rows."""
    rows = [np.ones(num_states)]
    for _ in range(dim - 1):
        rows.append(rng.normal(size=num_states))
    return build_span(np.vstack(rows))
