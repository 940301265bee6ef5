"""Integer-valued quadratic forms stored by their Hessian matrix.

A form Q(x) = sum_{i<=j} c_ij x_i x_j has Hessian H with H_ii = 2 c_ii and
H_ij = c_ij, so that Q(x) = x^t H x / 2.  The Hessian is the canonical
stored object; Gram values B = H/2 are produced as exact rationals.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import cached_property
from math import lcm

from . import linalg


class DegenerateFormError(ValueError):
    pass


class QuadraticForm:
    """Immutable integral quadratic form.

    >>> Q = QuadraticForm([[2, 1], [1, 2]])
    >>> Q(1, 1)
    3
    """

    def __init__(self, hessian):
        h = tuple(tuple(int(x) for x in row) for row in hessian)
        n = len(h)
        for i, row in enumerate(h):
            if len(row) != n:
                raise ValueError("Hessian must be square")
            if row[i] % 2:
                raise ValueError("Hessian diagonal must be even")
            for j in range(i):
                if row[j] != h[j][i]:
                    raise ValueError("Hessian must be symmetric")
        self._h = h

    @property
    def n(self) -> int:
        return len(self._h)

    @property
    def hessian(self):
        return [list(r) for r in self._h]

    @property
    def gram(self):
        return [[Fraction(x, 2) for x in r] for r in self._h]

    @cached_property
    def det_hessian(self) -> int:
        return linalg.det_bareiss(self._h)

    @property
    def det_gram(self) -> Fraction:
        return Fraction(self.det_hessian, 2**self.n)

    @property
    def is_degenerate(self) -> bool:
        return self.det_hessian == 0

    @cached_property
    def level(self) -> int:
        return level(self)

    @cached_property
    def signature(self):
        return signature(self)

    @property
    def is_positive_definite(self) -> bool:
        return self.signature[0] == self.n

    def __call__(self, *x):
        if len(x) == 1 and not isinstance(x[0], (int, Fraction)):
            x = tuple(x[0])
        return evaluate(self, x)

    def __eq__(self, other):
        return isinstance(other, QuadraticForm) and self._h == other._h

    def __hash__(self):
        return hash(self._h)

    def __repr__(self):
        return f"QuadraticForm({self.hessian})"

    def __add__(self, other):
        return direct_sum(self, other)

    def to_json(self) -> dict:
        return {"n": self.n, "hessian": self.hessian}

    @classmethod
    def from_json(cls, obj) -> "QuadraticForm":
        if isinstance(obj, str):
            obj = json.loads(obj)
        H = obj["hessian"]
        if "n" in obj and obj["n"] != len(H):
            raise ValueError("'n' does not match the Hessian size")
        return cls(H)

    def upper_coefficients(self) -> dict:
        return to_upper_coefficients(self)


def from_upper_coefficients(coeffs: dict, n: int) -> QuadraticForm:
    """Build a form from polynomial coefficients keyed by (i, j), i <= j.

    Indices are 0-based.
    """
    H = [[0] * n for _ in range(n)]
    for (i, j), c in coeffs.items():
        if i > j:
            i, j = j, i
        if not 0 <= i <= j < n:
            raise IndexError(f"coefficient index {(i, j)} out of range")
        if int(c) != c:
            raise ValueError("coefficients must be integers")
        if i == j:
            H[i][i] += 2 * int(c)
        else:
            H[i][j] += int(c)
            H[j][i] += int(c)
    return QuadraticForm(H)


def to_upper_coefficients(Q: QuadraticForm) -> dict:
    H = Q._h
    out = {}
    for i in range(Q.n):
        for j in range(i, Q.n):
            c = H[i][i] // 2 if i == j else H[i][j]
            if c:
                out[(i, j)] = c
    return out


def diagonal(*coeffs) -> QuadraticForm:
    """sum a_i x_i^2."""
    return QuadraticForm([[2 * a if i == j else 0 for j in range(len(coeffs))] for i, a in enumerate(coeffs)])


def sum_of_squares(n: int) -> QuadraticForm:
    return diagonal(*([1] * n))


def _check_dim(Q, *vs):
    for v in vs:
        if len(v) != Q.n:
            raise ValueError(f"expected a vector of length {Q.n}, got {len(v)}")


def evaluate(Q: QuadraticForm, x):
    _check_dim(Q, x)
    H = Q._h
    s = 0
    for i, xi in enumerate(x):
        if xi:
            row = H[i]
            s += xi * (row[i] // 2 * xi + sum(row[j] * x[j] for j in range(i + 1, Q.n)))
    return s


def hessian_bilinear(Q: QuadraticForm, x, y):
    """H(x, y) = Q(x+y) - Q(x) - Q(y) = x^t H y."""
    _check_dim(Q, x, y)
    return sum(xi * sum(h * yj for h, yj in zip(row, y)) for xi, row in zip(x, Q._h) if xi)


def gram_bilinear(Q: QuadraticForm, x, y) -> Fraction:
    return Fraction(hessian_bilinear(Q, x, y)) / 2


def transform(Q: QuadraticForm, M, require_unimodular=False) -> QuadraticForm:
    """Substitute x -> M x; the new Hessian is M^t H M.

    M must be an integer matrix, invertible over Q; with
    ``require_unimodular`` it must have determinant +-1.
    """
    M = linalg.integer_matrix(M)
    if len(M) != Q.n:
        raise ValueError("basis change has the wrong number of rows")
    if len(M) == len(M[0]):
        d = linalg.det_bareiss(M)
        if d == 0:
            raise ValueError("basis change is not invertible")
        if require_unimodular and abs(d) != 1:
            raise ValueError("basis change is not invertible over Z")
    return QuadraticForm(linalg.congruence(M, Q._h))


def direct_sum(*forms: QuadraticForm) -> QuadraticForm:
    n = sum(Q.n for Q in forms)
    H = [[0] * n for _ in range(n)]
    off = 0
    for Q in forms:
        for i in range(Q.n):
            for j in range(Q.n):
                H[off + i][off + j] = Q._h[i][j]
        off += Q.n
    return QuadraticForm(H)


def scale(Q: QuadraticForm, a: int) -> QuadraticForm:
    if a == 0:
        raise ValueError("cannot scale a form by zero")
    return QuadraticForm([[a * x for x in r] for r in Q._h])


def level(Q: QuadraticForm) -> int:
    """Smallest N > 0 with N H^{-1} integral with even diagonal."""
    if Q.is_degenerate:
        raise DegenerateFormError("level of a degenerate form")
    if Q.n == 0:
        return 1
    Hinv = linalg.inverse(Q._h)
    N = 1
    for row in Hinv:
        for x in row:
            N = lcm(N, x.denominator)
    if any((N * Hinv[i][i]).numerator % 2 for i in range(Q.n)):
        N *= 2
    return N


def signature(Q: QuadraticForm):
    """(number of positive, number of negative) diagonal entries."""
    if Q.is_degenerate:
        raise DegenerateFormError("signature of a degenerate form")
    d, _ = linalg.symmetric_diagonalize(Q._h)
    pos = sum(1 for x in d if x > 0)
    return pos, Q.n - pos


def is_positive_definite(Q: QuadraticForm) -> bool:
    return signature(Q)[0] == Q.n


def ldl(Q: QuadraticForm):
    """Rational LDL^t split of the Gram matrix of a positive definite form.

    Returns (d, mu) with Q(x) = sum_i d_i (x_i + sum_{j>i} mu[i][j] x_j)^2.
    """
    n = Q.n
    A = [[Fraction(x, 2) for x in r] for r in Q._h]
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        if A[i][i] <= 0:
            raise ValueError("form is not positive definite")
        d[i] = A[i][i]
        for j in range(i + 1, n):
            mu[i][j] = A[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                A[j][k] -= d[i] * mu[i][j] * mu[i][k]
    return d, mu


def zero_form() -> QuadraticForm:
    return QuadraticForm([])
