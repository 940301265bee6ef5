"""Shared independent oracles for the test suite."""

import itertools
import math
from math import gcd

from quadforms import linalg
from quadforms.theta import theta_coefficients, theta_multiplier, theta_tail_bound, theta_value


def brute_force_theta(Q, M):
    """r_Q(0..M) by scanning the box |x_i| <= sqrt(2 M (H^-1)_ii)."""
    Hinv = linalg.inverse(Q.hessian)
    bounds = [math.isqrt(int(2 * M * Hinv[i][i]) + 1) + 1 for i in range(Q.n)]
    out = [0] * (M + 1)
    for x in itertools.product(*[range(-b, b + 1) for b in bounds]):
        v = Q(x)
        if v <= M:
            out[v] += 1
    return out


def brute_force_points(Q, p):
    """Nonsingular projective zeros of Q mod p, counted over all vectors."""
    count = 0
    for x in itertools.product(range(p), repeat=Q.n):
        if any(x) and Q(x) % p == 0 and any(t % p for t in linalg.matvec(Q.hessian, x)):
            count += 1
    assert count % (p - 1) == 0
    return count // (p - 1)


def sample_gamma0(N, rng, count, cmax_mult=2, dmax=7):
    """Distinct matrices in Gamma_0(N) with small entries, c > 0."""
    out = set()
    while len(out) < count:
        c = N * rng.randint(1, cmax_mult)
        d = rng.choice([x for x in range(-dmax, dmax + 1) if x and gcd(x, c) == 1])
        # solve a d - b c = 1
        g, s, t = _egcd(d, c)
        a, b = s, -t
        k = rng.randint(-2, 2)
        a, b = a + k * c, b + k * d
        out.add(((a, b), (c, d)))
    return sorted(out)


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0) if a > 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def transformation_residual(Q, gamma, z, tol=1e-9):
    """|Theta(gamma z) - j(gamma, z) Theta(z)| with certified truncation.

    Returns (residual, certified error budget).  Both series are truncated
    where the rigorous tail bound drops below ``tol``.
    """
    (a, b), (c, d) = gamma
    gz = (a * z + b) / (c * z + d)
    M = 16
    while theta_tail_bound(Q, M, min(gz.imag, z.imag)) > tol:
        M *= 2
    prefix = theta_coefficients(Q, M)
    lhs, e1 = theta_value(prefix, gz, tail_bound=True)
    rhs, e2 = theta_value(prefix, z, tail_bound=True)
    j = theta_multiplier(Q, gamma, z)
    return abs(lhs - j * rhs), e1 + abs(j) * e2


def box_vectors(Q, target):
    """All x with Q(x) = target, by scanning a box from the inverse Hessian."""
    Hinv = linalg.inverse(Q.hessian)
    bounds = [math.isqrt(int(2 * target * Hinv[i][i]) + 1) + 1 for i in range(Q.n)]
    return [x for x in itertools.product(*[range(-b, b + 1) for b in bounds]) if Q(x) == target]


def brute_aut(Q):
    """|Aut| by choosing images column by column among box vectors."""
    H = Q.hessian
    cands = [box_vectors(Q, H[i][i] // 2) for i in range(Q.n)]

    def rec(k, cols):
        if k == Q.n:
            return 1
        total = 0
        for v in cands[k]:
            if all(sum(a * b for a, b in zip(v, linalg.matvec(H, c))) == H[k][j] for j, c in enumerate(cols)):
                total += rec(k + 1, cols + [v])
        return total

    return rec(0, [])
