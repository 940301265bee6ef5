"""Local invariants of rational quadratic forms.

Places are written as a prime ``p`` or the string ``"inf"``.  Hasse
invariants use the product over i < j of Hilbert symbols of a
diagonalization; with that convention the isotropy criteria below are the
classical ones (e.g. Serre, *A Course in Arithmetic*, IV.2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import isprime

from . import linalg
from .arith import (
    as_fraction,
    legendre,
    non_residue,
    prime_divisors,
    reduce_mod,
    sqrt_mod_prime_power,
    squarefree_part,
    unit_part,
    valuation,
)
from .forms import DegenerateFormError, QuadraticForm, direct_sum, scale

INF = "inf"


def is_infinite(v) -> bool:
    return v in (INF, math.inf, "oo", "infinity")


def check_place(v):
    if is_infinite(v):
        return INF
    v = int(v)
    if v < 2 or not isprime(v):
        raise ValueError(f"{v} is not a prime")
    return v


def _require_nondegenerate(*forms):
    for Q in forms:
        if Q.is_degenerate:
            raise DegenerateFormError("form is degenerate")


# ---------------------------------------------------------------- square classes


def square_class(a, v):
    """Canonical label of the class of a in K^x / (K^x)^2 for K = Q_v.

    ``(sign,)`` at infinity, ``(v mod 2, 1 or non-residue)`` at odd p and
    ``(v mod 2, u mod 8)`` at p = 2.
    """
    a = as_fraction(a)
    if a == 0:
        raise ValueError("zero has no square class")
    v = check_place(v)
    if v == INF:
        return (1 if a > 0 else -1,)
    k = valuation(a, v)
    u = unit_part(a, v)
    if v == 2:
        return (k % 2, reduce_mod(u, 8))
    return (k % 2, 1 if legendre(u, v) == 1 else non_residue(v))


def all_square_classes(v):
    """Representatives of every square class of Q_v."""
    v = check_place(v)
    if v == INF:
        return [Fraction(1), Fraction(-1)]
    units = [1, 3, 5, 7] if v == 2 else [1, non_residue(v)]
    return [Fraction(u * v**k) for k in (0, 1) for u in units]


def is_local_square(a, v) -> bool:
    cls = square_class(a, v)
    if check_place(v) == INF:
        return cls == (1,)
    return cls[0] == 0 and cls[1] == 1


# ---------------------------------------------------------------- Hilbert symbol


def hilbert_symbol(a, b, v) -> int:
    """(a, b)_v for nonzero rationals a, b."""
    a, b = as_fraction(a), as_fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    v = check_place(v)
    if v == INF:
        return -1 if a < 0 and b < 0 else 1
    alpha, beta = valuation(a, v), valuation(b, v)
    u, w = unit_part(a, v), unit_part(b, v)
    if v == 2:
        u, w = reduce_mod(u, 8), reduce_mod(w, 8)
        eps = lambda x: ((x - 1) // 2) % 2
        omega = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)
        return -1 if e % 2 else 1
    s = (-1) ** (alpha * beta * ((v - 1) // 2))
    if beta % 2:
        s *= legendre(u, v)
    if alpha % 2:
        s *= legendre(w, v)
    return s


def hilbert_bad_places(a, b):
    """Places where (a, b)_v can differ from 1: infinity, 2 and primes dividing ab."""
    a, b = as_fraction(a), as_fraction(b)
    n = a.numerator * a.denominator * b.numerator * b.denominator
    return [INF] + sorted(set([2] + prime_divisors(n)))


# ---------------------------------------------------------------- diagonalization


def diagonalize_over_Q(Q: QuadraticForm):
    """Orthogonal basis over Q.

    Returns ``(a, M)`` where Q(M x) = sum a_i x_i^2; entries of ``a`` are
    nonzero rationals and ``M`` is a rational invertible matrix.
    """
    _require_nondegenerate(Q)
    d, M = linalg.symmetric_diagonalize(Q.gram)
    return d, M


def determinant_class(Q: QuadraticForm) -> int:
    """Squarefree representative of det(Gram) in Q^x/(Q^x)^2."""
    _require_nondegenerate(Q)
    return squarefree_part(Q.det_gram)


def hasse_invariant(Q: QuadraticForm, v, diag=None) -> int:
    _require_nondegenerate(Q)
    a = diag if diag is not None else diagonalize_over_Q(Q)[0]
    c = 1
    for i, j in itertools.combinations(range(len(a)), 2):
        c *= hilbert_symbol(a[i], a[j], v)
    return c


@dataclass(frozen=True)
class InvariantTriple:
    n: int
    d: tuple
    c: int

    def to_json(self):
        return {"n": self.n, "det_class": list(self.d), "hasse": self.c}


def invariant_triple(Q: QuadraticForm, v) -> InvariantTriple:
    if Q.n == 0:
        return InvariantTriple(0, square_class(1, v), 1)
    _require_nondegenerate(Q)
    return InvariantTriple(Q.n, square_class(Q.det_gram, v), hasse_invariant(Q, v))


def signature_pair(Q: QuadraticForm):
    return Q.signature


def isometric_over_R(Q1: QuadraticForm, Q2: QuadraticForm) -> bool:
    _require_nondegenerate(Q1, Q2)
    return Q1.n == Q2.n and Q1.signature == Q2.signature


def isometric_over_Qp(Q1: QuadraticForm, Q2: QuadraticForm, p) -> bool:
    _require_nondegenerate(Q1, Q2)
    if check_place(p) == INF:
        return isometric_over_R(Q1, Q2)
    return invariant_triple(Q1, p) == invariant_triple(Q2, p)


def relevant_primes(*forms):
    """2 together with the primes dividing any of the Hessian determinants."""
    out = {2}
    for Q in forms:
        out.update(prime_divisors(Q.det_hessian))
    return sorted(out)


def isometric_over_Q(Q1: QuadraticForm, Q2: QuadraticForm) -> bool:
    """Hasse-Minkowski test; only finitely many places need checking."""
    _require_nondegenerate(Q1, Q2)
    if Q1.n != Q2.n:
        return False
    if squarefree_part(Q1.det_gram) != squarefree_part(Q2.det_gram):
        return False
    if not isometric_over_R(Q1, Q2):
        return False
    return all(isometric_over_Qp(Q1, Q2, p) for p in relevant_primes(Q1, Q2))


def is_isotropic_over_Qp(Q: QuadraticForm, p) -> bool:
    _require_nondegenerate(Q)
    p = check_place(p)
    n = Q.n
    if p == INF:
        pos, neg = Q.signature
        return pos > 0 and neg > 0
    if n <= 1:
        return False
    if n >= 5:
        return True
    a, _ = diagonalize_over_Q(Q)
    d = Q.det_gram
    eps = hasse_invariant(Q, p, a)
    if n == 2:
        return is_local_square(-d, p)
    if n == 3:
        return hilbert_symbol(-1, -d, p) == eps
    return (not is_local_square(d, p)) or eps == hilbert_symbol(-1, -1, p)


# ---------------------------------------------------------------- Jordan splitting


@dataclass
class JordanPiece:
    """One indecomposable summand p^scale * form of a Jordan splitting."""

    scale: int
    form: QuadraticForm
    columns: tuple


@dataclass
class JordanDecomposition:
    p: int
    pieces: list
    witness: list
    precision: int
    original: QuadraticForm = field(repr=False, default=None)

    @property
    def blocks(self):
        """[(j, Q_j)] with Q_j the (unimodular) sum of all pieces of scale p^j."""
        out = []
        for j in sorted({pc.scale for pc in self.pieces}):
            out.append((j, direct_sum(*[pc.form for pc in self.pieces if pc.scale == j])))
        return out

    def reassemble(self) -> QuadraticForm:
        """The direct sum of the p^j Q_j in witness column order."""
        return direct_sum(*[scale(pc.form, self.p**pc.scale) for pc in self.pieces])

    def check(self) -> bool:
        """W^t H W == reassembled Hessian mod p^precision, det W a p-unit."""
        mod = self.p**self.precision
        W = self.witness
        if linalg.det_bareiss(W) % self.p == 0:
            return False
        lhs = linalg.congruence(W, self.original.hessian)
        rhs = self.reassemble().hessian
        return all((x - y) % mod == 0 for r1, r2 in zip(lhs, rhs) for x, y in zip(r1, r2))

    def to_json(self):
        return {
            "p": self.p,
            "precision": self.precision,
            "blocks": [{"exponent": j, "form": Qj.to_json()} for j, Qj in self.blocks],
        }


X2 = QuadraticForm([[2]])
HYPERBOLIC = QuadraticForm([[0, 1], [1, 0]])
HEXAGONAL = QuadraticForm([[2, 1], [1, 2]])


def _split_over_Zp(H, p):
    """Block-diagonalize H by a p-integral basis change with unit determinant.

    Returns (A, T, pieces) with A = T^t H T exact and pieces a list of
    index tuples (length 1, or 2 when p = 2).
    """
    n = len(H)
    A = [[Fraction(x) for x in r] for r in H]
    T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add_col(dst, src, f):
        for r in range(n):
            T[r][dst] += f * T[r][src]
            A[r][dst] += f * A[r][src]
        for c in range(n):
            A[dst][c] += f * A[src][c]

    active = list(range(n))
    pieces = []
    while active:
        vals = [(valuation(A[i][j], p), i, j) for i in active for j in active if A[i][j] != 0]
        if not vals:
            raise DegenerateFormError("form is degenerate")
        vmin = min(v for v, _, _ in vals)
        diag = [i for v, i, j in vals if v == vmin and i == j]
        if not diag and p != 2:
            _, k, l = next(t for t in vals if t[0] == vmin)
            add_col(k, l, Fraction(1))
            diag = [k]
        if diag:
            k = diag[0]
            for j in active:
                if j != k and A[k][j] != 0:
                    add_col(j, k, -A[k][j] / A[k][k])
            pieces.append((k,))
            active.remove(k)
            continue
        _, k, l = next(t for t in vals if t[0] == vmin)
        a, b, c = A[k][k], A[k][l], A[l][l]
        det = a * c - b * b
        for j in active:
            if j in (k, l):
                continue
            x, y = A[k][j], A[l][j]
            if x == 0 and y == 0:
                continue
            f1 = (c * x - b * y) / det
            f2 = (a * y - b * x) / det
            add_col(j, k, -f1)
            add_col(j, l, -f2)
        pieces.append((k, l))
        active.remove(k)
        active.remove(l)
    return A, T, pieces


def _newton_lift(B, S, target, p, prec):
    """Refine S with S^t B S = target (mod p^3) to precision p^prec.

    ``target`` must be unimodular at p.  All matrices are integral.
    """
    mod = p ** (prec + 2)
    Tinv = linalg.inverse(target)
    n = len(target)
    for _ in range(64):
        E = [[(x - y) for x, y in zip(r1, r2)] for r1, r2 in zip(linalg.congruence(S, B), target)]
        E = [[x % mod if x % mod < mod // 2 else x % mod - mod for x in r] for r in E]
        if all(x % p**prec == 0 for r in E for x in r):
            return [[x % p**prec for x in r] for r in S]
        X = linalg.matmul(Tinv, E)
        X = [[-x / 2 for x in r] for r in X]
        X = [[reduce_mod(x, mod) for x in r] for r in X]
        S = linalg.matmul(S, [[int(i == j) + X[i][j] for j in range(n)] for i in range(n)])
        S = [[x % mod for x in r] for r in S]
    raise ArithmeticError("Newton lifting failed to converge")


def _canonical_2_block(a, b, c, prec):
    """Normalize the 2-adic binary piece a x^2 + b xy + c y^2 (b a unit).

    Returns (canonical form, 2x2 integer matrix S mod 2^prec).
    """
    mod = 2 ** (prec + 3)
    a, b, c = reduce_mod(a, mod), reduce_mod(b, mod), reduce_mod(c, mod)
    target = HYPERBOLIC if (a * c) % 2 == 0 else HEXAGONAL
    B = [[2 * a, b], [b, 2 * c]]
    T = target.hessian
    for s in itertools.product(range(8), repeat=4):
        S = [[s[0], s[1]], [s[2], s[3]]]
        if (s[0] * s[3] - s[1] * s[2]) % 2 == 0:
            continue
        C = linalg.congruence(S, B)
        if all((x - y) % 8 == 0 for r1, r2 in zip(C, T) for x, y in zip(r1, r2)):
            break
    else:
        raise ArithmeticError("no 2-adic normalization found")
    return target, _newton_lift(B, S, T, 2, prec)


def jordan_decompose(Q: QuadraticForm, p: int, precision: int | None = None) -> JordanDecomposition:
    """Jordan splitting of Q over Z_p.

    Pieces are u x^2 (u a canonical unit representative) and, at p = 2,
    also xy and x^2 + xy + y^2, each scaled by a power of p.  The witness
    W is an integer matrix with W^t H W congruent to the reassembled
    Hessian modulo p^precision.
    """
    _require_nondegenerate(Q)
    p = check_place(p)
    if p == INF:
        raise ValueError("Jordan splitting is for finite primes")
    if precision is None:
        precision = valuation(Q.det_hessian, p) + (6 if p == 2 else 3)
    A, T, idx = _split_over_Zp(Q.hessian, p)
    K = precision + valuation(Q.det_hessian, p) + 4
    mod = p**K
    Tm = [[reduce_mod(x, mod) for x in r] for r in T]
    n = Q.n
    W = [[0] * n for _ in range(n)]
    pieces = []
    col = 0
    for piece in idx:
        if len(piece) == 1:
            (k,) = piece
            a = A[k][k] / 2
            j = valuation(a, p)
            u = unit_part(a, p)
            if p == 2:
                uc = reduce_mod(u, 8)
            else:
                uc = 1 if legendre(u, p) == 1 else non_residue(p)
            ratio = reduce_mod(uc / u, mod)
            s = sqrt_mod_prime_power(ratio, p, K)
            for r in range(n):
                W[r][col] = Tm[r][k] * s % mod
            pieces.append(JordanPiece(j, QuadraticForm([[2 * uc]]), (col,)))
            col += 1
        else:
            k, l = piece
            b = A[k][l]
            j = valuation(b, p)
            sc = Fraction(p) ** j
            form, S = _canonical_2_block(A[k][k] / 2 / sc, b / sc, A[l][l] / 2 / sc, K)
            for r in range(n):
                W[r][col] = (Tm[r][k] * S[0][0] + Tm[r][l] * S[1][0]) % mod
                W[r][col + 1] = (Tm[r][k] * S[0][1] + Tm[r][l] * S[1][1]) % mod
            pieces.append(JordanPiece(j, form, (col, col + 1)))
            col += 2
    # group pieces of equal scale together, then order by scale
    order = sorted(range(len(pieces)), key=lambda i: (pieces[i].scale, pieces[i].form.n, i))
    cols = [c for i in order for c in pieces[i].columns]
    W = [[row[c] for c in cols] for row in W]
    out, c0 = [], 0
    for i in order:
        pc = pieces[i]
        out.append(JordanPiece(pc.scale, pc.form, tuple(range(c0, c0 + pc.form.n))))
        c0 += pc.form.n
    return JordanDecomposition(p, out, W, precision, Q)


def jordan_invariants(Q: QuadraticForm, p: int):
    """Invariants of the Z_p-class read off a Jordan splitting.

    Odd p: (exponent, rank, Legendre symbol of the unit determinant) per
    block, which is a complete invariant.  p = 2: for each Gram scale
    2^s the rank and the parity type of the constituent; these are
    invariants but not a complete set.
    """
    jd = jordan_decompose(Q, p)
    if p != 2:
        out = []
        for j, Qj in jd.blocks:
            u = 1
            for i in range(Qj.n):
                u *= Qj.hessian[i][i] // 2
            out.append((j, Qj.n, legendre(u, p)))
        return tuple(out)
    const = {}
    for pc in jd.pieces:
        s = pc.scale if pc.form.n == 1 else pc.scale - 1
        dim, odd = const.get(s, (0, False))
        const[s] = (dim + pc.form.n, odd or pc.form.n == 1)
    return tuple((s, dim, "I" if odd else "II") for s, (dim, odd) in sorted(const.items()))
