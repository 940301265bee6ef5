import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadforms.densities import (
    BudgetExceeded,
    IncompleteCatalogError,
    PiSqrt,
    UnsupportedError,
    count_solutions_mod_p_power,
    dirichlet_l_value,
    eisenstein_coefficient_genus_avg,
    eisenstein_coefficient_product,
    eisenstein_series_genus_avg,
    four_squares_density,
    jacobi_r4,
    local_density_infty,
    local_density_p,
    shell_density_numeric,
)
from quadforms.forms import QuadraticForm, diagonal, sum_of_squares
from quadforms.genus import GenusCatalog, genus_enumerate
from quadforms.theta import theta_coefficients

from .conftest import forms

I4 = sum_of_squares(4)
HEX = QuadraticForm([[2, 1], [1, 2]])


def naive_count(Q, m, q):
    return sum(1 for x in itertools.product(range(q), repeat=Q.n) if (Q(x) - m) % q == 0)


def test_count_examples():
    assert count_solutions_mod_p_power(I4, 1, 3, 1) == 24
    assert count_solutions_mod_p_power(I4, 3, 3, 1) == 33
    assert count_solutions_mod_p_power(diagonal(1), 1, 2, 3) == 4


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_count_mod_p_closed_forms(p):
    for m in (1, 2, p, 2 * p):
        expect = p**3 - p if m % p else p**3 + p * (p - 1)
        assert count_solutions_mod_p_power(I4, m, p, 1) == expect


@given(forms(max_n=3, bound=5), st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(0, 60))
@settings(max_examples=50)
def test_count_routes_agree(Q, p, i, m):
    if (p**i) ** Q.n > 20000:
        return
    a = count_solutions_mod_p_power(Q, m, p, i, method="exhaustive")
    b = count_solutions_mod_p_power(Q, m, p, i, method="split")
    assert a == b == naive_count(Q, m, p**i)


def test_budget_error():
    with pytest.raises(BudgetExceeded):
        count_solutions_mod_p_power(I4, 1, 7, 3, budget=1000, method="exhaustive")
    with pytest.raises(BudgetExceeded):
        count_solutions_mod_p_power(I4, 1, 7, 5, budget=1000)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_density_closed_forms(p):
    assert local_density_p(I4, 1, p).rational == 1 - Fraction(1, p * p)
    assert local_density_p(I4, p, p).rational == (1 - Fraction(1, p * p)) * (1 + Fraction(1, p))
    assert local_density_p(I4, 2 * p, p).rational == four_squares_density(p, 2 * p)


def test_density_at_two():
    assert local_density_p(I4, 1, 2).rational == 1
    assert local_density_p(I4, 7, 2).rational == 1
    assert local_density_p(I4, 2, 2).rational == Fraction(3, 2)
    assert local_density_p(I4, 6, 2).rational == Fraction(3, 2)


def test_density_rejects_zero():
    with pytest.raises(ValueError):
        local_density_p(I4, 0, 3)


@given(forms(max_n=3, bound=4), st.sampled_from([3, 5, 7]), st.integers(1, 40))
@settings(max_examples=40)
def test_hensel_stability_at_good_primes(Q, p, m):
    if (2 * Q.det_hessian * m) % p == 0:
        return
    r1 = Fraction(count_solutions_mod_p_power(Q, m, p, 1), p ** (Q.n - 1))
    r2 = Fraction(count_solutions_mod_p_power(Q, m, p, 2), p ** (2 * (Q.n - 1)))
    assert r1 == r2


@given(forms(max_n=3, bound=4), st.sampled_from([2, 3, 5]), st.integers(1, 30))
@settings(max_examples=40)
def test_densities_nonnegative_and_zero_iff_unrepresented(Q, p, m):
    val = local_density_p(Q, m, p)
    assert val.rational >= 0
    i = val.exponent
    count = count_solutions_mod_p_power(Q, m, p, i)
    assert (val.rational == 0) == (count == 0)


def test_infinite_density_examples():
    assert local_density_infty(I4, 1).value == PiSqrt(Fraction(1), Fraction(2))
    assert local_density_infty(I4, 7).value == PiSqrt(Fraction(7), Fraction(2))
    v = local_density_infty(sum_of_squares(2), 1).value
    assert v == PiSqrt(Fraction(1), Fraction(1))
    with pytest.raises(ValueError):
        local_density_infty(I4, 0)
    with pytest.raises(ValueError):
        local_density_infty(QuadraticForm([[0, 1], [1, 0]]), 1)


def test_infinite_density_linear_in_m():
    base = local_density_infty(I4, 1).value
    for m in range(1, 30):
        assert local_density_infty(I4, m).value == base * m


@given(forms(max_n=6, bound=3, definite=True), st.integers(1, 20))
@settings(max_examples=25)
def test_infinite_density_matches_numeric_oracle(Q, m):
    exact = float(local_density_infty(Q, m))
    numeric = shell_density_numeric(Q, m, eps=1e-4)
    assert math.isclose(exact, numeric, rel_tol=1e-6)


def test_jacobi_examples():
    assert jacobi_r4(1) == 8
    assert jacobi_r4(2) == 24
    assert jacobi_r4(4) == 24
    assert [jacobi_r4(m) for m in range(1, 40)] == theta_coefficients(I4, 39).coefficients[1:]


def test_product_examples():
    assert eisenstein_coefficient_product(I4, 1).rational == 8
    assert eisenstein_coefficient_product(I4, 11).rational == 96
    assert eisenstein_coefficient_product(I4, 15).rational == 192
    assert eisenstein_coefficient_product(I4, 0).rational == 1
    with pytest.raises(UnsupportedError):
        eisenstein_coefficient_product(I4, 4)
    with pytest.raises(UnsupportedError):
        eisenstein_coefficient_product(HEX, 1)
    with pytest.raises(UnsupportedError):
        eisenstein_coefficient_product(diagonal(1, 1, 1), 3, tail="l_value")


def test_l_values():
    assert dirichlet_l_value(-4, 1) == PiSqrt(Fraction(1, 8), Fraction(1), 1) * PiSqrt.sqrt_of(4)
    assert dirichlet_l_value(1, 2) == PiSqrt(Fraction(1, 6), Fraction(2))
    assert dirichlet_l_value(1, 4) == PiSqrt(Fraction(1, 90), Fraction(4))
    assert math.isclose(float(dirichlet_l_value(-3, 1)), math.pi / (3 * math.sqrt(3)))
    # truncated Dirichlet series as an independent check
    from quadforms.arith import kronecker

    for D, k in [(5, 2), (-3, 1), (-4, 3), (8, 2), (-7, 1)]:
        terms = 200000 if k == 1 else 20000
        approx = sum(kronecker(D, m) / m**k for m in range(1, terms))
        assert math.isclose(float(dirichlet_l_value(D, k)), approx, rel_tol=1e-3 if k == 1 else 1e-6)


@pytest.mark.parametrize(
    "Q",
    [
        pytest.param(I4, id="I4"),
        pytest.param(HEX, id="hex"),
        pytest.param(sum_of_squares(2), id="I2"),
        pytest.param(QuadraticForm([[2, 1], [1, 4]]), id="disc-7"),
        pytest.param(diagonal(1, 1, 1, 3), id="diag1113"),
        pytest.param(sum_of_squares(6), id="I6", marks=pytest.mark.slow),
    ],
)
def test_product_with_l_value_tail_matches_genus_average(Q):
    cat = genus_enumerate(Q)
    avg = eisenstein_series_genus_avg(cat, 24)
    for m in range(1, 25):
        val = eisenstein_coefficient_product(Q, m, tail="l_value", restricted=False)
        assert val.value.is_rational
        assert val.rational == avg[m], m


def test_genus_average_examples():
    cat = genus_enumerate(I4)
    assert eisenstein_coefficient_genus_avg(I4, 1, cat).rational == 8
    for p in (2, 3, 5, 7, 13):
        assert eisenstein_coefficient_genus_avg(I4, p, cat).rational == 8 * (p + 1) or p == 2
    assert eisenstein_coefficient_genus_avg(I4, 0, cat).rational == 1
    bad = GenusCatalog(cat.representatives, cat.aut_counts, "heuristic", [3])
    with pytest.raises(IncompleteCatalogError):
        eisenstein_coefficient_genus_avg(I4, 1, bad)


def test_genus_average_independent_of_start():
    Q = diagonal(1, 1, 1, 7)
    cat = genus_enumerate(Q)
    other = [R for R in cat.representatives if R != cat.representatives[0]][0]
    cat2 = genus_enumerate(other)
    for m in range(1, 15):
        assert eisenstein_coefficient_genus_avg(Q, m, cat).rational == eisenstein_coefficient_genus_avg(other, m, cat2).rational


def test_pisqrt_arithmetic():
    a = PiSqrt.sqrt_of(Fraction(12, 5))
    assert a == PiSqrt(Fraction(2, 5), Fraction(0), 15)
    assert (a * a).is_rational and (a * a).rational() == Fraction(12, 5)
    assert (a / a).rational() == 1
