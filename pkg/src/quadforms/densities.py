"""Local representation densities and Eisenstein coefficients.

Finite densities are solution counts of Q(x) = m modulo p^i divided by
p^((n-1) i), taken once the ratio has stopped moving.  The archimedean
density and the tail of the Euler product are kept as exact
rational * pi^e * sqrt(s) values so that pi cancels symbolically.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd

import numpy as np
from sympy import bernoulli, factorint, isprime

from .arith import kronecker, prime_divisors, reduce_mod, valuation
from .forms import QuadraticForm, sum_of_squares
from .local import INF, _split_over_Zp, check_place
from .theta import enumerate_representations

DEFAULT_BUDGET = int(os.environ.get("QUADFORMS_BUDGET", 1 << 22))


class BudgetExceeded(RuntimeError):
    pass


class StabilizationError(ArithmeticError):
    pass


class UnsupportedError(ValueError):
    pass


class IncompleteCatalogError(ValueError):
    pass


# ---------------------------------------------------------------- exact pi/sqrt numbers


@dataclass(frozen=True)
class PiSqrt:
    """coef * pi^pi_exp * sqrt(rad) with rad a squarefree positive integer."""

    coef: Fraction
    pi_exp: Fraction = Fraction(0)
    rad: int = 1

    def __mul__(self, other):
        if not isinstance(other, PiSqrt):
            other = PiSqrt(Fraction(other))
        r = self.rad * other.rad
        g = gcd(self.rad, other.rad)
        # sqrt(a) sqrt(b) = g sqrt(ab / g^2) for squarefree a, b
        return PiSqrt(self.coef * other.coef * g, self.pi_exp + other.pi_exp, r // (g * g))

    __rmul__ = __mul__

    def inverse(self):
        return PiSqrt(1 / (self.coef * self.rad), -self.pi_exp, self.rad)

    def __truediv__(self, other):
        if not isinstance(other, PiSqrt):
            other = PiSqrt(Fraction(other))
        return self * other.inverse()

    @property
    def is_rational(self) -> bool:
        return self.pi_exp == 0 and self.rad == 1

    def rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coef

    def __float__(self):
        return float(self.coef) * math.pi ** float(self.pi_exp) * math.sqrt(self.rad)

    @classmethod
    def sqrt_of(cls, x) -> "PiSqrt":
        """Exact sqrt of a positive rational."""
        x = Fraction(x)
        if x <= 0:
            raise ValueError("sqrt of a non-positive number")
        n = x.numerator * x.denominator
        f, s = 1, 1
        for q, e in factorint(n).items():
            f *= q ** (e // 2)
            s *= q ** (e % 2)
        return cls(Fraction(f, x.denominator), Fraction(0), s)

    def to_json(self):
        return {
            "num": self.coef.numerator,
            "den": self.coef.denominator,
            "pi_exp": str(self.pi_exp),
            "sqrt": self.rad,
            "decimal": float(self),
        }


@dataclass(frozen=True)
class LocalDensityValue:
    place: object
    value: PiSqrt
    exponent: int | None = None

    @property
    def rational(self) -> Fraction:
        return self.value.rational()

    def __float__(self):
        return float(self.value)

    def to_json(self):
        return {"place": self.place, "value": self.value.to_json()}


@dataclass(frozen=True)
class EisensteinCoefficient:
    m: int
    value: PiSqrt
    provenance: str

    @property
    def rational(self) -> Fraction:
        return self.value.rational()

    def to_json(self):
        return {"m": self.m, "provenance": self.provenance, "value": self.value.to_json()}


# ---------------------------------------------------------------- counting mod p^i


def _exhaustive_count(Q, m, p, i, budget):
    q = p**i
    n = Q.n
    if q**n > budget:
        raise BudgetExceeded(f"(Z/{p}^{i})^{n} has {q**n} points, budget {budget}")
    H = Q.hessian
    xs = np.arange(q, dtype=np.int64)
    # values of the partial form on the first k coordinates, kept mod q
    vals = np.zeros(1, dtype=np.int64)
    coords = []
    for k in range(n):
        shape = (len(vals),)
        new = (vals[:, None] + (H[k][k] // 2) * xs[None, :] ** 2 % q) % q
        for j, cj in enumerate(coords):
            if H[j][k]:
                new = (new + (H[j][k] * cj[:, None] % q) * xs[None, :]) % q
        coords = [np.repeat(c, q) for c in coords] + [np.tile(xs, shape[0])]
        vals = new.reshape(-1)
    return int(np.count_nonzero(vals == m % q))


def _block_histograms(Q, p, i, budget):
    """Histograms over Z/p^i of the summands of a p-adic block splitting."""
    q = p**i
    A, _, pieces = _split_over_Zp(Q.hessian, p)
    xs = np.arange(q, dtype=np.int64)
    sq = xs * xs % q
    out = []
    for piece in pieces:
        if len(piece) == 1:
            (k,) = piece
            a = reduce_mod(A[k][k] / 2, q)
            out.append(np.bincount(a * sq % q, minlength=q))
            continue
        if q * q > 64 * budget:
            raise BudgetExceeded(f"binary block mod {p}^{i} exceeds budget {budget}")
        k, l = piece
        a, b, c = reduce_mod(A[k][k] / 2, q), reduce_mod(A[k][l], q), reduce_mod(A[l][l] / 2, q)
        h = np.zeros(q, dtype=np.int64)
        step = max(1, (1 << 22) // q)
        cy = c * sq % q
        for x0 in range(0, q, step):
            x = xs[x0:x0 + step, None]
            vals = (a * sq[x0:x0 + step, None] + b * (x * xs[None, :] % q) + cy[None, :]) % q
            h += np.bincount(vals.reshape(-1), minlength=q)
        out.append(h)
    return out


def _residue_labels(p, i):
    """Orbit labels of Z/p^i under multiplication by unit squares."""
    q = p**i
    r = np.arange(q, dtype=np.int64)
    v = np.zeros(q, dtype=np.int64)
    u = r.copy()
    u[0] = 1
    for _ in range(i):
        div = (u % p == 0)
        u = np.where(div, u // p, u)
        v += div
    v[0] = i
    t = i - v
    if p == 2:
        cls = u % np.minimum(8, 2 ** np.maximum(t, 0))
    else:
        cls = np.array([pow(int(x), (p - 1) // 2, p) for x in u % p], dtype=np.int64)
    cls[0] = 0
    key = v * (8 * p) + cls
    uniq, labels = np.unique(key, return_inverse=True)
    reps = np.array([int(np.nonzero(labels == k)[0][0]) for k in range(len(uniq))])
    return labels, reps


def _dot_at(h1, h2, c, q):
    idx = (c - np.arange(q)) % q
    if float(h1.max()) * float(h2.max()) * q < 2**62 and h1.dtype != object and h2.dtype != object:
        return int(np.dot(h1, h2[idx]))
    return int(np.dot(h1.astype(object), h2.astype(object)[idx]))


def count_solutions_mod_p_power(Q: QuadraticForm, m: int, p: int, i: int, budget=None, method="auto") -> int:
    """#{x in (Z/p^i)^n : Q(x) = m mod p^i}.

    ``method="exhaustive"`` walks the whole box (bounded by ``budget``);
    ``"split"`` counts through a p-adic block splitting and convolves
    block histograms, using that each histogram is constant on orbits of
    unit squares.  ``"auto"`` picks the exhaustive walk when it fits.
    """
    p = int(p)
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if i < 1:
        raise ValueError("exponent must be positive")
    budget = DEFAULT_BUDGET if budget is None else budget
    if method == "exhaustive" or (method == "auto" and (p**i) ** Q.n <= min(budget, 1 << 16)):
        return _exhaustive_count(Q, m, p, i, budget)
    if Q.is_degenerate:
        return _exhaustive_count(Q, m, p, i, budget)
    q = p**i
    if q > budget:
        raise BudgetExceeded(f"modulus {p}^{i} too large for budget {budget}")
    hists = _block_histograms(Q, p, i, budget)
    labels, reps = _residue_labels(p, i)
    acc = hists[0].astype(np.int64)
    for h in hists[1:-1] if len(hists) > 1 else []:
        rep_vals = [_dot_at(acc, h, int(c), q) for c in reps]
        if max(rep_vals) < 2**62:
            acc = np.array(rep_vals, dtype=np.int64)[labels]
        else:
            acc = np.array(rep_vals, dtype=object)[labels]
    if len(hists) == 1:
        return int(acc[m % q])
    return _dot_at(acc, hists[-1], m % q, q)


def local_density_ratio(Q, m, p, i, **kw) -> Fraction:
    return Fraction(count_solutions_mod_p_power(Q, m, p, i, **kw), p ** ((Q.n - 1) * i))


def local_density_p(Q: QuadraticForm, m: int, p: int, max_extra=8, **kw) -> LocalDensityValue:
    """beta_p(m) by counting at a checked stable exponent.

    Starts at i = 1 + v_p(4 m det H) and accepts the first i whose ratio
    equals the ratio at i + 1.
    """
    p = check_place(p)
    if p == INF:
        return local_density_infty(Q, m)
    if m == 0:
        raise ValueError("finite local densities at m = 0 are not supported")
    if Q.is_degenerate:
        raise ValueError("form is degenerate")
    i = 1 + valuation(4 * m * Q.det_hessian, p)
    prev = local_density_ratio(Q, m, p, i, **kw)
    for _ in range(max_extra):
        nxt = local_density_ratio(Q, m, p, i + 1, **kw)
        if nxt == prev:
            return LocalDensityValue(p, PiSqrt(prev), i)
        prev = nxt
        i += 1
    raise StabilizationError(f"density at p={p}, m={m} did not stabilize by p^{i}")


def local_density_infty(Q: QuadraticForm, m: int) -> LocalDensityValue:
    """Derivative in T of the volume of {Q <= T} at T = m.

    pi^(n/2) m^(n/2-1) / (Gamma(n/2) sqrt(det Gram)); for x^2+y^2+z^2+w^2
    this is pi^2 m.
    """
    if m <= 0:
        raise ValueError("archimedean density needs m > 0")
    if Q.n == 0 or not Q.is_positive_definite:
        raise ValueError("archimedean density needs a positive definite form")
    n = Q.n
    det = Q.det_gram
    if n % 2 == 0:
        k = n // 2
        val = PiSqrt(Fraction(m ** (k - 1), factorial(k - 1)), Fraction(k)) / PiSqrt.sqrt_of(det)
    else:
        k = (n - 1) // 2
        # pi^(n/2) / Gamma(n/2) = pi^k 4^k k! / (2k)!
        c = Fraction(4**k * factorial(k), factorial(2 * k))
        val = PiSqrt(c * Fraction(m) ** (k - 1) if k >= 1 else c / m, Fraction(k)) * PiSqrt.sqrt_of(Fraction(m) / det)
        if k == 0:
            val = PiSqrt(c / m, Fraction(0)) * PiSqrt.sqrt_of(Fraction(m) / det)
    return LocalDensityValue(INF, val)


def ball_volume_quadrature(n: int) -> float:
    """Volume of the unit n-ball by iterated 1-D quadrature (no Gamma function)."""
    from scipy.integrate import quad

    V = 2.0
    for k in range(2, n + 1):
        f = lambda t, k=k: (1 - t * t) ** ((k - 1) / 2)
        V *= quad(f, -1, 1, epsabs=1e-14, epsrel=1e-13)[0]
    return V if n >= 1 else 1.0


def shell_density_numeric(Q: QuadraticForm, m: float, eps=1e-3) -> float:
    """Numeric oracle: central difference of Vol{Q <= T} at T = m."""
    from .forms import ldl

    d, _ = ldl(Q)
    scale = 1.0 / math.prod(math.sqrt(float(x)) for x in d)
    vol = lambda T: ball_volume_quadrature(Q.n) * scale * T ** (Q.n / 2)
    h = eps * m
    return (vol(m + h) - vol(m - h)) / (2 * h)


# ---------------------------------------------------------------- four squares closed forms


def four_squares_density(p: int, m: int) -> Fraction:
    """Closed-form beta_p(m) for x^2+y^2+z^2+w^2 (p odd with v_p(m) <= 1, or p = 2 with v_2(m) <= 1)."""
    v = valuation(m, p)
    if p == 2:
        if v == 0:
            return Fraction(1)
        if v == 1:
            return Fraction(3, 2)
    else:
        base = 1 - Fraction(1, p * p)
        if v == 0:
            return base
        if v == 1:
            return base * (1 + Fraction(1, p))
    raise UnsupportedError("closed form only covers v_p(m) <= 1")


def jacobi_r4(m: int) -> int:
    """8 times the sum of the divisors of m not divisible by 4."""
    if m < 1:
        raise ValueError("m must be positive")
    return 8 * sum(d for d in _divisors(m) if d % 4)


def _divisors(m):
    ds = [1]
    for q, e in factorint(m).items():
        ds = [d * q**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def _is_squarefree(m):
    return all(e == 1 for e in factorint(m).values())


def four_squares_product(m: int) -> EisensteinCoefficient:
    """r(m) for the sum of four squares from the Euler product, m squarefree.

    r(1) = pi^2 * 1 * prod_{p>2} (1 - p^-2) with the odd product equal to
    (4/3) / zeta(2) and zeta(2) = pi^2/6; then each p | m changes only
    beta_inf and beta_p.
    """
    if m < 1 or not _is_squarefree(m):
        raise UnsupportedError("restricted product mode needs squarefree m")
    zeta2 = PiSqrt(Fraction(1, 6), Fraction(2))
    beta_inf_1 = PiSqrt(Fraction(1), Fraction(2))
    odd_product = PiSqrt(1 / (1 - Fraction(1, 4))) / zeta2
    r1 = beta_inf_1 * four_squares_density(2, 1) * odd_product
    val = r1 * (PiSqrt(Fraction(m), Fraction(2)) / beta_inf_1)
    for p in factorint(m):
        val = val * (four_squares_density(p, m) / four_squares_density(p, 1))
    return EisensteinCoefficient(m, val, "product")


# ---------------------------------------------------------------- L-values and tails


def fundamental_discriminant(D: int) -> int:
    """Fundamental discriminant D0 with chi_D = chi_D0 away from primes dividing D."""
    if D == 0:
        raise ValueError("zero discriminant")
    sign = -1 if D < 0 else 1
    core = 1
    for q, e in factorint(abs(D)).items():
        if e % 2:
            core *= q
    core *= sign
    return core if core % 4 == 1 else 4 * core


def _bernoulli_number(j) -> Fraction:
    # sympy >= 1.12 returns B_1 = +1/2; the polynomial expansion needs -1/2
    return Fraction(-1, 2) if j == 1 else Fraction(str(bernoulli(j)))


def _bernoulli_poly(k, x: Fraction) -> Fraction:
    return sum(Fraction(math.comb(k, j)) * _bernoulli_number(j) * x ** (k - j) for j in range(k + 1))


def generalized_bernoulli(k: int, D0: int) -> Fraction:
    f = abs(D0)
    if f == 1:
        return _bernoulli_number(k) if k != 1 else Fraction(1, 2)
    return Fraction(f) ** (k - 1) * sum(kronecker(D0, a) * _bernoulli_poly(k, Fraction(a, f)) for a in range(1, f + 1))


def dirichlet_l_value(D0: int, k: int) -> PiSqrt:
    """L(k, chi_D0) for a fundamental discriminant with sign(D0) = (-1)^k."""
    f = abs(D0)
    a = 0 if D0 > 0 else 1
    if (k - a) % 2:
        raise UnsupportedError("L(k, chi) is not a rational multiple of pi^k sqrt(f) for this parity")
    B = generalized_bernoulli(k, D0)
    c = Fraction((-1) ** (1 + (k - a) // 2), 2) * Fraction(2**k, f**k) * B / factorial(k)
    return PiSqrt(c, Fraction(k)) * PiSqrt.sqrt_of(f)


def euler_tail(Q: QuadraticForm, bad_primes) -> PiSqrt:
    """prod over p not in bad_primes of (1 - chi(p) p^{-n/2}) for even n."""
    n = Q.n
    if n % 2:
        raise UnsupportedError("no built-in tail evaluator for odd n")
    k = n // 2
    D = (-1) ** k * Q.det_hessian
    D0 = fundamental_discriminant(D)
    val = dirichlet_l_value(D0, k).inverse()
    for p in bad_primes:
        val = val / (1 - Fraction(kronecker(D0, p), p**k))
    return val


def siegel_factor(n: int) -> Fraction:
    # representing a single number: the Siegel constant is 1/2 for n = 2
    return Fraction(1, 2) if n <= 2 else Fraction(1)


def eisenstein_coefficient_product(Q: QuadraticForm, m: int, tail=None, restricted="auto", **kw) -> EisensteinCoefficient:
    """a_E(m) from the product of local densities.

    For x^2+y^2+z^2+w^2 and squarefree m the closed-form chain is used
    (``restricted=True`` forces it).  Otherwise densities at p | 2 m det
    are counted and the remaining primes come from ``tail``: a callable
    (Q, bad_primes) -> PiSqrt, or ``"l_value"`` for :func:`euler_tail`.
    """
    if m == 0:
        return EisensteinCoefficient(0, PiSqrt(Fraction(1)), "product")
    is_four_squares = Q == sum_of_squares(4)
    if restricted is True or (restricted == "auto" and is_four_squares and m > 0 and _is_squarefree(m)):
        if not is_four_squares:
            raise UnsupportedError("restricted mode is only for x^2+y^2+z^2+w^2")
        return four_squares_product(m)
    if tail is None:
        raise UnsupportedError("outside the restricted mode a tail evaluator is needed")
    if tail == "l_value":
        tail = euler_tail
    bad = sorted(set([2] + prime_divisors(m * Q.det_hessian)))
    val = local_density_infty(Q, m).value * siegel_factor(Q.n)
    for p in bad:
        val = val * local_density_p(Q, m, p, **kw).value
    val = val * tail(Q, bad)
    return EisensteinCoefficient(m, val, "product")


def eisenstein_coefficient_genus_avg(Q: QuadraticForm, m: int, genus, allow_heuristic=False) -> EisensteinCoefficient:
    """Weighted average of r_{Q'}(m) over the classes of a genus catalog."""
    if genus.completeness != "verified" and not allow_heuristic:
        raise IncompleteCatalogError("genus catalog is not certified complete")
    if Q.det_hessian != genus.representatives[0].det_hessian or Q.n != genus.representatives[0].n:
        raise ValueError("form does not belong to this genus catalog")
    if m == 0:
        return EisensteinCoefficient(0, PiSqrt(Fraction(1)), "genus_average")
    num = sum(Fraction(enumerate_representations(R, m), a) for R, a in zip(genus.representatives, genus.aut_counts))
    return EisensteinCoefficient(m, PiSqrt(num / genus.mass), "genus_average")


def eisenstein_series_genus_avg(genus, M: int, allow_heuristic=False):
    """a_E(0..M) in one sweep over the catalog."""
    from .theta import theta_coefficients

    if genus.completeness != "verified" and not allow_heuristic:
        raise IncompleteCatalogError("genus catalog is not certified complete")
    acc = [Fraction(0)] * (M + 1)
    for R, a in zip(genus.representatives, genus.aut_counts):
        th = theta_coefficients(R, M).coefficients
        for k in range(M + 1):
            acc[k] += Fraction(th[k], a)
    return [x / genus.mass for x in acc]
