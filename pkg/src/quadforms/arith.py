"""Small exact number-theory helpers shared by the other modules."""

import numbers
from fractions import Fraction
from math import gcd, isqrt

from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, (str, numbers.Rational)):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("valuation of zero is infinite")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    x = as_fraction(x)
    return x / Fraction(p) ** valuation(x, p)


def squarefree_part(x) -> int:
    """Canonical squarefree integer in the squareclass of a nonzero rational."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("zero has no squareclass")
    n = x.numerator * x.denominator
    sign = -1 if n < 0 else 1
    out = 1
    for q, e in factorint(abs(n)).items():
        if e % 2:
            out *= q
    return sign * out


def is_square_rational(x) -> bool:
    x = as_fraction(x)
    if x < 0:
        return False
    return isqrt(x.numerator) ** 2 == x.numerator and isqrt(x.denominator) ** 2 == x.denominator


def prime_divisors(n: int) -> list:
    n = abs(int(n))
    if n == 0:
        raise ValueError("zero has infinitely many prime divisors")
    return sorted(factorint(n))


def mod_inverse(a: int, m: int) -> int:
    return pow(a, -1, m)


def reduce_mod(x, q: int) -> int:
    """Image in Z/qZ of a rational whose denominator is prime to q."""
    x = as_fraction(x)
    return x.numerator * pow(x.denominator, -1, q) % q


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive modulus")
    a %= n
    acc = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                acc = -acc
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            acc = -acc
        a %= n
    return acc if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers a, n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    acc = 1
    if n < 0:
        n = -n
        if a < 0:
            acc = -acc
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            acc = -acc
    if n == 1:
        return acc
    return acc * jacobi(a, n)


def legendre(a, p: int) -> int:
    """Legendre symbol of a p-integral rational modulo an odd prime."""
    return jacobi(reduce_mod(a, p), p) if reduce_mod(a, p) else 0


def non_residue(p: int) -> int:
    """Smallest quadratic non-residue modulo an odd prime."""
    a = 2
    while jacobi(a, p) != -1:
        a += 1
    return a


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int:
    """A square root of a modulo p**k; a must be a unit square there."""
    r = sqrt_mod(a % p**k, p**k)
    if r is None:
        raise ValueError(f"{a} is not a square mod {p}^{k}")
    return int(r)


def primitive(v) -> bool:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g == 1


def next_prime(n: int) -> int:
    n += 1
    while not isprime(n):
        n += 1
    return n
