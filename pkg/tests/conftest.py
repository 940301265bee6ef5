import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from quadforms.forms import QuadraticForm

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")


def random_form(rng, n, lo=-4, hi=4, definite=False, nondegenerate=True):
    """Random even symmetric Hessian; rejection-sampled for the requested property."""
    while True:
        H = [[0] * n for _ in range(n)]
        for i in range(n):
            H[i][i] = 2 * rng.randint(1 if definite else lo, hi)
            for j in range(i):
                H[i][j] = H[j][i] = rng.randint(lo, hi)
        Q = QuadraticForm(H)
        if nondegenerate and Q.is_degenerate:
            continue
        if definite and not Q.is_positive_definite:
            continue
        return Q


@st.composite
def forms(draw, min_n=1, max_n=4, bound=4, definite=False, nondegenerate=True):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_form(random.Random(seed), n, -bound, bound, definite, nondegenerate)


@st.composite
def unimodular_matrices(draw, n, steps=6):
    """Product of random elementary integer matrices."""
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(draw(st.integers(0, steps))):
        if n == 1:
            M = [[-M[0][0]]]
            continue
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1).filter(lambda t: t != i))
        c = draw(st.integers(-2, 2))
        for r in range(n):
            M[r][j] += c * M[r][i]
    return M


nonzero_rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30).filter(lambda x: x != 0)


@pytest.fixture
def rng():
    return random.Random(12345)
