"""Theta series of positive definite forms.

Lattice points are found by nested interval bounds coming from the
rational LDL^t split of the Gram matrix.  Bounds are evaluated in floating
point with a safety margin; every candidate is re-checked with exact
integer arithmetic, so counts are exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import isqrt

import numpy as np

from .arith import kronecker, squarefree_part
from .forms import QuadraticForm, evaluate, ldl

_SLACK = 1e-9


class IndefiniteFormError(ValueError):
    pass


def _require_definite(Q):
    if Q.n and not Q.is_positive_definite:
        raise IndefiniteFormError("form must be positive definite")


def _float_ldl(Q):
    d, mu = ldl(Q)
    return [float(x) for x in d], [[float(x) for x in r] for r in mu]


def _outer(Q, bound, inner=2):
    """Walk the coordinates x_inner .. x_{n-1} inside the ellipsoid Q <= bound.

    Yields (outer_coords, budget) where budget is the (slightly widened)
    room left for the first ``inner`` coordinates.
    """
    n = Q.n
    d, mu = _float_ldl(Q)
    x = [0] * n
    tol = _SLACK * (1 + bound)

    def rec(i, budget):
        if i < inner:
            yield tuple(x[inner:]), budget
            return
        if budget < -tol:
            return
        c = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(budget, 0.0) / d[i])
        for xi in range(math.ceil(c - r - 1e-9), math.floor(c + r + 1e-9) + 1):
            x[i] = xi
            yield from rec(i - 1, budget - d[i] * (xi - c) ** 2 + tol)
        x[i] = 0

    yield from rec(n - 1, float(bound) + tol)


class _Inner:
    """Integer and floating data for vectorizing over (x_0, x_1)."""

    def __init__(self, Q):
        H = Q.hessian
        self.Q = Q
        self.H = H
        self.n = Q.n
        self.d, self.mu = _float_ldl(Q)

    def setup(self, outer):
        """Linear/constant parts once the coordinates x_2.. are fixed."""
        H, n = self.H, self.n
        full = (0, 0) + outer
        self.L0 = sum(H[0][j] * full[j] for j in range(2, n))
        self.L1 = sum(H[1][j] * full[j] for j in range(2, n))
        self.C = evaluate(self.Q, full)
        self.c1 = -sum(self.mu[1][j] * full[j] for j in range(2, n))
        self.c0_base = -sum(self.mu[0][j] * full[j] for j in range(2, n))

    def x1_range(self, budget):
        r = math.sqrt(max(budget, 0.0) / self.d[1])
        lo, hi = math.ceil(self.c1 - r - 1e-9), math.floor(self.c1 + r + 1e-9)
        return np.arange(lo, hi + 1, dtype=np.int64)

    def pairs(self, budget, tol):
        """All (x0, x1) inside the ellipse slice, as two int64 arrays."""
        x1 = self.x1_range(budget)
        b0 = budget - self.d[1] * (x1 - self.c1) ** 2 + tol
        r0 = np.sqrt(np.maximum(b0, 0.0) / self.d[0])
        c0 = self.c0_base - self.mu[0][1] * x1
        lo = np.ceil(c0 - r0 - 1e-9).astype(np.int64)
        hi = np.floor(c0 + r0 + 1e-9).astype(np.int64)
        k = np.where(b0 >= 0, hi - lo + 1, 0).clip(min=0)
        total = int(k.sum())
        if total == 0:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        starts = np.repeat(np.cumsum(k) - k, k)
        x0 = np.repeat(lo, k) + (np.arange(total, dtype=np.int64) - starts)
        return x0, np.repeat(x1, k)

    def values(self, x0, x1):
        H = self.H
        return (
            (H[0][0] // 2) * x0 * x0
            + x0 * (H[0][1] * x1 + self.L0)
            + (H[1][1] // 2) * x1 * x1
            + self.L1 * x1
            + self.C
        )


def _small_enough(Q, bound):
    big = max(abs(x) for r in Q.hessian for x in r)
    return (bound + 1) * (big + 1) ** 2 * Q.n**2 < 2**50


def _exact_sqrt_mask(disc):
    s = np.floor(np.sqrt(np.maximum(disc, 0).astype(float))).astype(np.int64)
    for _ in range(2):
        s = np.where(s * s > disc, s - 1, s)
        s = np.where((s + 1) * (s + 1) <= disc, s + 1, s)
    return s, (disc >= 0) & (s * s == disc)


def short_vectors(Q: QuadraticForm, bound: int):
    """All integer vectors x with Q(x) <= bound, as (Q(x), x) pairs."""
    _require_definite(Q)
    if Q.n == 0:
        yield 0, ()
        return
    d, mu = _float_ldl(Q)
    for outer, budget in _outer(Q, bound, inner=1):
        c = -sum(mu[0][j] * outer[j - 1] for j in range(1, Q.n))
        r = math.sqrt(max(budget, 0.0) / d[0])
        for x0 in range(math.ceil(c - r - 1e-9), math.floor(c + r + 1e-9) + 1):
            v = (x0,) + outer
            q = evaluate(Q, v)
            if q <= bound:
                yield q, v


def _representations_py(Q, m, vectors):
    H = Q.hessian
    a = H[0][0] // 2
    found, count = [], 0
    for outer, _ in _outer(Q, m, inner=1):
        full = (0,) + outer
        lin = sum(H[0][j] * full[j] for j in range(1, Q.n))
        disc = lin * lin - 4 * a * (evaluate(Q, full) - m)
        if disc < 0:
            continue
        s = isqrt(disc)
        if s * s != disc:
            continue
        for num in {-lin + s, -lin - s}:
            if num % (2 * a) == 0:
                count += 1
                if vectors:
                    found.append((num // (2 * a),) + outer)
    return found if vectors else count


_SPLIT_MEMO_MAX = 2**18


@lru_cache(maxsize=64)
def _split_prefix(Q: QuadraticForm, M: int):
    return theta_coefficients(Q, M).coefficients


def enumerate_representations(Q: QuadraticForm, m: int, vectors=False, split=True):
    """r_Q(m) = #{x in Z^n : Q(x) = m}; the list of such x with ``vectors``.

    Counts for orthogonal sums come from the product of the block series,
    memoized per form in power-of-two prefixes, so scanning many m is
    cheap.  ``split=False`` always walks the ellipsoid Q(x) = m directly.
    """
    _require_definite(Q)
    m = int(m)
    if m < 0:
        return [] if vectors else 0
    if Q.n == 0:
        hit = [()] if m == 0 else []
        return hit if vectors else len(hit)
    if split and not vectors and m <= _SPLIT_MEMO_MAX and len(orthogonal_components(Q)) > 1:
        return _split_prefix(Q, max(64, 1 << m.bit_length()))[m]
    if Q.n == 1 or not _small_enough(Q, m):
        return _representations_py(Q, m, vectors)
    inner = _Inner(Q)
    a0 = Q.hessian[0][0] // 2
    H01 = Q.hessian[0][1]
    found, count = [], 0
    for outer, budget in _outer(Q, m, inner=2):
        inner.setup(outer)
        x1 = inner.x1_range(budget)
        if x1.size == 0:
            continue
        lin = H01 * x1 + inner.L0
        rest = (Q.hessian[1][1] // 2) * x1 * x1 + inner.L1 * x1 + inner.C
        disc = lin * lin - 4 * a0 * (rest - m)
        s, ok = _exact_sqrt_mask(disc)
        for sign in (1, -1):
            num = -lin + sign * s
            hit = ok & (num % (2 * a0) == 0)
            if sign == -1:
                hit &= s != 0
            count += int(hit.sum())
            if vectors:
                for x0, x1v in zip((num[hit] // (2 * a0)).tolist(), x1[hit].tolist()):
                    found.append((x0, x1v) + outer)
    return sorted(found) if vectors else count


def orthogonal_components(Q: QuadraticForm):
    """Index sets of the block-diagonal pieces of the Hessian."""
    H = Q.hessian
    n = Q.n
    seen, comps = set(), []
    for s in range(n):
        if s in seen:
            continue
        stack, comp = [s], []
        seen.add(s)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if j not in seen and H[i][j] != 0:
                    seen.add(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _restrict(Q, idx):
    H = Q.hessian
    return QuadraticForm([[H[i][j] for j in idx] for i in idx])


def _sweep(Q: QuadraticForm, M: int):
    """Histogram of Q over {Q(x) <= M}; the two innermost coordinates are vectorized."""
    counts = np.zeros(M + 1, dtype=np.int64)
    if Q.n == 0:
        counts[0] = 1
        return counts
    if Q.n == 1 or not _small_enough(Q, M):
        for q, _ in short_vectors(Q, M):
            counts[q] += 1
        return counts
    inner = _Inner(Q)
    tol = _SLACK * (1 + M)
    for outer, budget in _outer(Q, M, inner=2):
        inner.setup(outer)
        x0, x1 = inner.pairs(budget, tol)
        if x0.size == 0:
            continue
        vals = inner.values(x0, x1)
        vals = vals[(vals >= 0) & (vals <= M)]
        counts += np.bincount(vals, minlength=M + 1)
    return counts


def _convolve(u, v, M):
    if (M + 1) * float(max(u.max(), 1)) * float(max(v.max(), 1)) < 2**62:
        return np.convolve(u.astype(np.int64), v.astype(np.int64))[: M + 1]
    out = np.zeros(M + 1, dtype=object)
    nz = np.nonzero(u)[0]
    v = v.astype(object)
    for i in nz:
        out[i:] += int(u[i]) * v[: M + 1 - i]
    return out


@dataclass
class ThetaPrefix:
    form: QuadraticForm
    M: int
    coefficients: list

    def __getitem__(self, m):
        return self.coefficients[m]

    def to_json(self):
        return {"max": self.M, "coefficients": list(self.coefficients)}


def theta_coefficients(Q: QuadraticForm, M: int, split=True) -> ThetaPrefix:
    """r_Q(0), ..., r_Q(M) in one sweep.

    With ``split`` the Hessian is first cut into its orthogonal blocks and
    the block series are multiplied, which is exact and much faster for
    sums like x^2+y^2+z^2+w^2.
    """
    _require_definite(Q)
    M = int(M)
    if M < 0:
        raise ValueError("M must be nonnegative")
    comps = orthogonal_components(Q) if split else [list(range(Q.n))]
    series = None
    cache = {}
    for idx in comps:
        sub = _restrict(Q, idx)
        if sub not in cache:
            cache[sub] = _sweep(sub, M)
        s = cache[sub]
        series = s if series is None else _convolve(series, s, M)
    if series is None:
        series = np.zeros(M + 1, dtype=np.int64)
        series[0] = 1
    return ThetaPrefix(Q, M, [int(x) for x in series])


def count_in_ball(Q: QuadraticForm, M: int) -> int:
    return int(_sweep(Q, M).sum()) if Q.n else 1


# ---------------------------------------------------------------- modular data


@dataclass(frozen=True)
class ModularMetadata:
    weight: Fraction
    level: int
    character_discriminant: int

    def character(self, d: int) -> int:
        return kronecker(self.character_discriminant, d)

    @property
    def trivial_character(self) -> bool:
        D = self.character_discriminant
        return D > 0 and isqrt(D) ** 2 == D

    def to_json(self):
        w = self.weight
        return {
            "weight": {"num": w.numerator, "den": w.denominator},
            "level": self.level,
            "character_discriminant": self.character_discriminant,
        }


def modular_metadata(Q: QuadraticForm) -> ModularMetadata:
    """Weight n/2, level N and the discriminant D of the character (D/.)

    For even n, D = (-1)^(n/2) det(H); since 2^n is a square this has the
    same square class as the Gram determinant.  For odd n the square class
    of the Gram determinant is stored (the multiplier lives in
    :func:`theta_multiplier`).
    """
    _require_definite(Q)
    n = Q.n
    sign = -1 if (n // 2) % 2 else 1
    if n % 2 == 0:
        D = sign * Q.det_hessian
    else:
        D = sign * squarefree_part(Q.det_gram)
    return ModularMetadata(Fraction(n, 2), Q.level, D)


def _eps(d):
    return 1 if d % 4 == 1 else 1j


def _shimura_symbol(c, d):
    s = kronecker(c, abs(d))
    if c < 0 and d < 0:
        s = -s
    return s


def _principal_sqrt(w):
    r = cmath.sqrt(w)
    # cmath gives arg in (-pi/2, pi/2]; keep that branch explicitly
    if r.real < 0 or (r.real == 0 and r.imag < 0):
        r = -r
    return r


def theta_multiplier(Q: QuadraticForm, gamma, z):
    """The factor j with Theta_Q(gamma z) = j * Theta_Q(z) for gamma in Gamma_0(N).

    Even n: chi_D(d) (cz+d)^(n/2).  Odd n: (det(Q)/d) [eps_d^{-1} (c/d)
    sqrt(cz+d)]^n with det(Q) the Gram determinant taken up to squares.
    """
    (a, b), (c, d) = gamma
    if a * d - b * c != 1 or c % Q.level:
        raise ValueError("gamma is not in Gamma_0(N)")
    if Q.n % 2 == 0:
        D = modular_metadata(Q).character_discriminant
        return kronecker(D, d) * (c * z + d) ** (Q.n // 2)
    # odd n: the level is divisible by 4, so d is odd
    D = squarefree_part(Q.det_gram)
    base = _shimura_symbol(c, d) / _eps(d) * _principal_sqrt(c * z + d)
    return kronecker(D, d) * base**Q.n


def theta_value(prefix: ThetaPrefix, z, tail_bound=False):
    """Evaluate the truncated series at z; optionally also a rigorous tail bound."""
    q = cmath.exp(2j * math.pi * z)
    coeffs = np.array(prefix.coefficients, dtype=float)
    powers = q ** np.arange(prefix.M + 1)
    val = complex(np.dot(coeffs, powers))
    if not tail_bound:
        return val
    return val, theta_tail_bound(prefix.form, prefix.M, z.imag)


def point_count_bound(Q: QuadraticForm, T: float) -> float:
    """Upper bound for #{x : Q(x) <= T} from the smallest Gram eigenvalue."""
    lam = float(np.linalg.eigvalsh(np.array(Q.gram, dtype=float)).min()) * (1 - 1e-9)
    return (2 * math.sqrt(T / lam) + 1) ** Q.n


def theta_tail_bound(Q: QuadraticForm, M: int, y: float) -> float:
    """Bound for |sum_{m > M} r_Q(m) q^m| at Im z = y.

    Dyadic shells (M 2^k, M 2^(k+1)] hold at most point_count_bound(M 2^(k+1))
    vectors, each of size at most exp(-2 pi y M 2^k).
    """
    total = 0.0
    k = 0
    while True:
        lo = max(M, 1) * 2**k
        term = point_count_bound(Q, 2 * lo) * math.exp(-2 * math.pi * y * lo)
        total += term
        if term < 1e-30 * max(total, 1e-300) or lo > 1e12:
            break
        k += 1
    return total


def terms_needed(Q: QuadraticForm, y: float, tol: float) -> int:
    M = 8
    while theta_tail_bound(Q, M, y) > tol:
        M *= 2
    return M


def cusp_coefficients(Q: QuadraticForm, M: int, genus, allow_heuristic=False):
    """a_C(m) = r_Q(m) - a_E(m) for m = 0..M, a_E being the genus average."""
    from .densities import eisenstein_series_genus_avg

    aE = eisenstein_series_genus_avg(genus, M, allow_heuristic=allow_heuristic)
    r = theta_coefficients(Q, M).coefficients
    return [Fraction(r[m]) - aE[m] for m in range(M + 1)]


def theta_table_csv(Q: QuadraticForm, M: int, genus=None, allow_heuristic=False) -> str:
    """CSV text with columns m, r_Q(m), a_E(m), a_C(m); the last two need a genus catalog."""
    import csv
    import io

    from .densities import eisenstein_series_genus_avg

    r = theta_coefficients(Q, M).coefficients
    aE = eisenstein_series_genus_avg(genus, M, allow_heuristic=allow_heuristic) if genus is not None else None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "r_Q(m)", "a_E(m)", "a_C(m)"])
    for m in range(M + 1):
        if aE is None:
            w.writerow([m, r[m], "", ""])
        else:
            w.writerow([m, r[m], str(aE[m]), str(r[m] - aE[m])])
    return buf.getvalue()
