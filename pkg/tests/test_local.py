import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadforms import linalg
from quadforms.arith import squarefree_part, valuation
from quadforms.forms import DegenerateFormError, QuadraticForm, diagonal, scale, sum_of_squares, transform
from quadforms.local import (
    INF,
    HEXAGONAL,
    HYPERBOLIC,
    all_square_classes,
    diagonalize_over_Q,
    hasse_invariant,
    hilbert_bad_places,
    hilbert_symbol,
    invariant_triple,
    is_isotropic_over_Qp,
    isometric_over_Q,
    isometric_over_Qp,
    isometric_over_R,
    jordan_decompose,
    jordan_invariants,
    square_class,
)

from .conftest import forms, nonzero_rationals, random_form, unimodular_matrices

I4 = sum_of_squares(4)
XY = QuadraticForm([[0, 1], [1, 0]])
HEX = QuadraticForm([[2, 1], [1, 2]])


# ---- oracles used only here


def _hilbert_oracle(a, b, p):
    """(a, b)_p by searching a primitive zero of a x^2 + b y^2 - z^2 mod p^k.

    After reducing a, b to squarefree integers every primitive zero mod
    p^3 (p odd) or 2^5 lifts by Hensel, and every p-adic zero reduces to one.
    """
    a, b = squarefree_part(a), squarefree_part(b)
    k = 5 if p == 2 else 3
    q = p**k
    r = np.arange(q, dtype=np.int64)
    sq = r * r % q
    ax = (a * sq) % q
    by = (b * sq) % q
    zz = sq
    lhs = (ax[:, None] + by[None, :]) % q  # indexed by (x, y)
    x_unit = (r % p != 0)
    for prim_xy in (True, False):
        # primitive: some coordinate is a unit
        if prim_xy:
            mask = x_unit[:, None] | x_unit[None, :]
            vals = lhs[mask]
            if np.isin(vals, zz).any():
                return 1
        else:
            vals = lhs  # x, y both non-units -> z must be a unit
            if np.isin(vals, zz[x_unit]).any():
                return 1
    return -1


def _isotropy_oracle(Q, p, depth=None):
    """Search for a primitive zero mod p^k that Hensel-lifts."""
    H = Q.hessian
    n = Q.n
    v = valuation(Q.det_hessian, p)
    k = depth or 2 * v + 3 + (2 if p == 2 else 0)

    def liftable(x, j):
        e = min(valuation(t, p) if t else 10**9 for t in linalg.matvec(H, x))
        return Q(x) % p ** (2 * e + 1) == 0 and 2 * e + 1 <= j

    def rec(x, j):
        # x is a primitive zero mod p^j
        if liftable(x, j):
            return True
        if j >= k:
            return False
        q = p**j
        for delta in itertools.product(range(p), repeat=n):
            y = [a + q * d for a, d in zip(x, delta)]
            if Q(y) % (q * p) == 0 and rec(y, j + 1):
                return True
        return False

    for x in itertools.product(range(p), repeat=n):
        if any(x) and Q(x) % p == 0 and rec(list(x), 1):
            return True
    return False


# ---- squareclasses and Hilbert symbols


def test_square_class_counts():
    assert len(all_square_classes(INF)) == 2
    assert len(all_square_classes(2)) == 8
    for p in (3, 5, 7, 11):
        assert len(all_square_classes(p)) == 4
    for v in (INF, 2, 3, 5):
        classes = {square_class(a, v) for a in all_square_classes(v)}
        assert len(classes) == len(all_square_classes(v))


def test_hilbert_examples():
    assert hilbert_symbol(-1, -1, INF) == -1
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(5, 7, 3) == 1
    with pytest.raises(ValueError):
        hilbert_symbol(0, 3, 5)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_hilbert_matches_search_oracle(p):
    reps = all_square_classes(p)
    for a in reps:
        for b in reps:
            assert hilbert_symbol(a, b, p) == _hilbert_oracle(a, b, p), (a, b)


@given(nonzero_rationals, nonzero_rationals, nonzero_rationals)
def test_hilbert_properties(a, b, c):
    places = sorted(set(hilbert_bad_places(a, b)) - {INF}) + [INF, 3, 5, 7]
    for v in places:
        assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)
        assert hilbert_symbol(a * c, b, v) == hilbert_symbol(a, b, v) * hilbert_symbol(c, b, v)
        assert hilbert_symbol(a, -a, v) == 1
        if a != 1:
            assert hilbert_symbol(a, 1 - a, v) == 1
        assert hilbert_symbol(a, b * c * c, v) == hilbert_symbol(a, b, v)
    prod = 1
    for v in hilbert_bad_places(a, b):
        prod *= hilbert_symbol(a, b, v)
    assert prod == 1


@pytest.mark.parametrize("v", [INF, 2, 3, 5])
def test_hilbert_nondegenerate(v):
    # a nonsquare pairs to -1 with something
    for a in all_square_classes(v):
        if square_class(a, v) != square_class(1, v):
            assert any(hilbert_symbol(a, b, v) == -1 for b in all_square_classes(v))


# ---- diagonalization and Hasse invariants


def test_diagonalization_examples():
    d, M = diagonalize_over_Q(diagonal(1, 3, 5))
    assert d == [1, 3, 5]
    d, _ = diagonalize_over_Q(XY)
    assert squarefree_part(d[0] * d[1]) == -1
    d, _ = diagonalize_over_Q(HEX)
    assert squarefree_part(d[0]) == 1 and squarefree_part(d[1]) == 3


@given(forms(max_n=5))
def test_diagonalization_witness(Q):
    d, M = diagonalize_over_Q(Q)
    G = linalg.congruence(M, Q.gram)
    assert all(G[i][j] == (d[i] if i == j else 0) for i in range(Q.n) for j in range(Q.n))
    assert all(x != 0 for x in d)


def test_hasse_examples():
    assert hasse_invariant(sum_of_squares(2), 5) == 1
    assert hasse_invariant(XY, 2) == 1
    for a in (1, 2, 3, -7):
        assert hasse_invariant(diagonal(a), 2) == 1
    with pytest.raises(DegenerateFormError):
        hasse_invariant(QuadraticForm([[2, 2], [2, 2]]), 3)


@given(st.data())
def test_hasse_invariant_under_rational_change(data):
    Q = data.draw(forms(max_n=4))
    M = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=Q.n, max_size=Q.n), min_size=Q.n, max_size=Q.n))
    if linalg.det_bareiss(M) == 0:
        return
    Q2 = transform(Q, M)
    for v in [INF, 2, 3, 5, 7]:
        assert hasse_invariant(Q2, v) == hasse_invariant(Q, v)
        assert isometric_over_Qp(Q, Q2, v)
    assert isometric_over_Q(Q, Q2)


def test_triple_conventions():
    for v in (INF, 2, 3):
        assert invariant_triple(QuadraticForm([]), v).c == 1
        assert invariant_triple(diagonal(7), v).c == 1
        assert invariant_triple(XY, v).c == 1  # (n, d) = (2, -1)


def test_equivalence_examples():
    # -1 is a square in Q_5, so x^2+y^2 and xy agree there; at 3 they do not
    assert square_class(-1, 5) == square_class(1, 5)
    assert isometric_over_Qp(sum_of_squares(2), XY, 5)
    assert not isometric_over_Qp(sum_of_squares(2), XY, 3)
    assert not isometric_over_R(I4, scale(I4, -1))
    assert not isometric_over_Q(sum_of_squares(2), diagonal(1, 2))
    # I4 and diag(1,1,2,2) agree everywhere: x^2+y^2 represents 2 rationally
    assert isometric_over_Q(I4, diagonal(1, 1, 2, 2))
    assert not isometric_over_Q(I4, diagonal(1, 1, 1, 7))


def test_isometric_over_Q_is_an_equivalence(rng):
    cat = [random_form(rng, 3, -3, 3) for _ in range(25)] + [diagonal(1, 1, 1), diagonal(1, 2, 2), diagonal(2, 1, 2)]
    rel = [[isometric_over_Q(a, b) for b in cat] for a in cat]
    n = len(cat)
    for i in range(n):
        assert rel[i][i]
        for j in range(n):
            assert rel[i][j] == rel[j][i]
            for k in range(n):
                if rel[i][j] and rel[j][k]:
                    assert rel[i][k]


def test_isotropy_examples():
    assert is_isotropic_over_Qp(diagonal(1, 1, 1, 1, 1), 2)
    for p in (2, 3, 5, INF):
        assert is_isotropic_over_Qp(XY, p)
    assert not is_isotropic_over_Qp(I4, 2)
    assert is_isotropic_over_Qp(I4, 3)
    assert not is_isotropic_over_Qp(I4, INF)


def test_isotropy_matches_search_oracle():
    rng = random.Random(7)
    checked = 0
    while checked < 40:
        n = rng.randint(1, 4)
        Q = random_form(rng, n, -3, 3)
        p = rng.choice([2, 3, 5])
        if valuation(Q.det_hessian, p) > (3 if p == 2 else 1) or (p == 5 and n == 4):
            continue
        assert is_isotropic_over_Qp(Q, p) == _isotropy_oracle(Q, p), (Q, p)
        checked += 1


# ---- Jordan decomposition


def test_jordan_examples():
    jd = jordan_decompose(I4, 3)
    assert [j for j, _ in jd.blocks] == [0]
    jd = jordan_decompose(diagonal(1, 3), 3)
    assert [(j, B.n) for j, B in jd.blocks] == [(0, 1), (1, 1)]
    jd = jordan_decompose(XY, 2)
    assert [(j, B) for j, B in jd.blocks] == [(0, HYPERBOLIC)]
    with pytest.raises(DegenerateFormError):
        jordan_decompose(QuadraticForm([[2, 2], [2, 2]]), 3)


def _allowed_2_piece(F):
    if F.n == 1:
        return F.hessian[0][0] // 2 in (1, 3, 5, 7)
    return F in (HYPERBOLIC, HEXAGONAL)


@given(forms(max_n=5, bound=6), st.sampled_from([2, 3, 5]))
def test_jordan_reassembles(Q, p):
    jd = jordan_decompose(Q, p)
    assert jd.check()
    R = jd.reassemble()
    assert valuation(R.det_hessian, p) == valuation(Q.det_hessian, p)
    for pc in jd.pieces:
        if p == 2:
            assert _allowed_2_piece(pc.form)
        else:
            assert pc.form.n == 1 and pc.form.hessian[0][0] % p != 0


@given(st.data())
def test_jordan_invariants_are_class_invariants(data):
    Q = data.draw(forms(max_n=4, bound=5))
    M = data.draw(unimodular_matrices(Q.n))
    Q2 = transform(Q, M)
    for p in (2, 3, 5):
        assert jordan_invariants(Q, p) == jordan_invariants(Q2, p)
