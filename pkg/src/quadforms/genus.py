"""Isometry testing, automorphism groups and Kneser p-neighbors.

Positive definite forms only.  Isometries are found by backtracking over
short vectors: the image of each basis vector must have the right norm
and the right Hessian pairings with the images already chosen.
"""

from __future__ import annotations

import itertools
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from sympy import isprime

from . import linalg
from .arith import mod_inverse, next_prime
from .forms import QuadraticForm, transform
from .local import jordan_invariants, relevant_primes
from .theta import IndefiniteFormError, short_vectors, theta_coefficients

THETA_SCREEN = 16


def _require_definite(Q):
    if Q.n == 0 or Q.is_degenerate or not Q.is_positive_definite:
        raise IndefiniteFormError("form must be positive definite")


# ---------------------------------------------------------------- reduction and screening


@lru_cache(maxsize=4096)
def _reduced(Q: QuadraticForm):
    """(LLL-reduced form R, U) with R = U^t H U."""
    U = linalg.lll_reduce(Q.gram)
    return transform(Q, U), U


@lru_cache(maxsize=4096)
def _theta_prefix(Q: QuadraticForm):
    return tuple(theta_coefficients(Q, THETA_SCREEN).coefficients)


def _candidates(Q: QuadraticForm, values):
    """Short vectors of Q grouped by norm, with their Hessian images."""
    top = max(values)
    by_norm = {}
    for q, x in short_vectors(Q, top):
        if q in values and q > 0:
            by_norm.setdefault(q, []).append(x)
    H = np.array(Q.hessian, dtype=np.int64)
    out = {}
    for q in values:
        C = np.array(by_norm.get(q, []), dtype=np.int64).reshape(-1, Q.n)
        out[q] = (C, C @ H)
    return out


def _isometries(src: QuadraticForm, tgt: QuadraticForm):
    """Yield matrices M (columns in tgt's lattice) with M^t H_tgt M = H_src."""
    n = src.n
    Hs = src.hessian
    norms = [Hs[i][i] // 2 for i in range(n)]
    cands = _candidates(tgt, set(norms))

    chosen = []

    def rec(k):
        if k == n:
            yield np.array(chosen, dtype=np.int64).T
            return
        C, G = cands[norms[k]]
        if len(C) == 0:
            return
        mask = np.ones(len(C), dtype=bool)
        if chosen:
            V = np.array(chosen, dtype=np.int64)
            mask &= np.all(G @ V.T == np.array(Hs[k][:k], dtype=np.int64), axis=1)
        for idx in np.nonzero(mask)[0]:
            chosen.append(C[idx])
            yield from rec(k + 1)
            chosen.pop()

    return rec(0)


@lru_cache(maxsize=4096)
def _aut_data(Q: QuadraticForm):
    R, _ = _reduced(Q)
    total = improper = 0
    for M in _isometries(R, R):
        total += 1
        if round(np.linalg.det(M)) < 0:
            improper += 1
    return total, improper


def automorphism_count(Q: QuadraticForm) -> int:
    """|Aut(Q)| = #{M in GL_n(Z) : M^t H M = H}."""
    _require_definite(Q)
    return _aut_data(Q)[0]


def has_improper_automorphism(Q: QuadraticForm) -> bool:
    _require_definite(Q)
    return _aut_data(Q)[1] > 0


def _screen(Q: QuadraticForm):
    return (Q.n, Q.det_hessian, Q.level, _theta_prefix(Q))


def is_isometric_Z(Q1: QuadraticForm, Q2: QuadraticForm):
    """An integer M with M^t H1 M = H2, or None when the forms are not Z-equivalent."""
    _require_definite(Q1)
    _require_definite(Q2)
    if Q1.n != Q2.n or _screen(Q1) != _screen(Q2):
        return None
    if _aut_data(Q1)[0] != _aut_data(Q2)[0]:
        return None
    R1, U1 = _reduced(Q1)
    R2, U2 = _reduced(Q2)
    for M in _isometries(R2, R1):
        # R2 = M^t R1 M, R1 = U1^t H1 U1, R2 = U2^t H2 U2
        W = linalg.matmul(linalg.matmul(U1, M.tolist()), linalg.inverse(U2))
        W = linalg.integer_matrix(W)
        assert linalg.congruence(W, Q1.hessian) == Q2.hessian
        return W
    return None


# ---------------------------------------------------------------- isotropic points and neighbors


def isotropic_points_mod_p(Q: QuadraticForm, p: int):
    """Normalized nonsingular zeros of Q in P^{n-1}(F_p).

    Representatives have first nonzero coordinate 1; nonsingular means
    H x is nonzero mod p.
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    n = Q.n
    H = np.array(Q.hessian, dtype=np.int64) % p
    half = np.array([h // 2 for h in np.diag(np.array(Q.hessian))], dtype=np.int64)
    upper = np.triu(np.array(Q.hessian, dtype=np.int64), 1) % p
    out = []
    for k in range(n):
        tail = n - k - 1
        grid = np.array(list(itertools.product(range(p), repeat=tail)), dtype=np.int64).reshape(p**tail, tail)
        X = np.zeros((len(grid), n), dtype=np.int64)
        X[:, k] = 1
        X[:, k + 1:] = grid
        vals = ((X * X) @ half + np.einsum("ij,jk,ik->i", X, upper, X)) % p
        grad = (X @ H) % p
        ok = (vals == 0) & np.any(grad != 0, axis=1)
        out.extend(tuple(int(t) for t in row) for row in X[ok])
    return out


def lift_isotropic_point(Q: QuadraticForm, x, p: int):
    """w = x + p z with p^2 | Q(w), solving H(x, z) = -Q(x)/p mod p."""
    x = [int(t) for t in x]
    if Q(x) % p:
        raise ValueError("point is not isotropic mod p")
    g = linalg.matvec(Q.hessian, x)
    j = next((i for i, t in enumerate(g) if t % p), None)
    if j is None:
        raise ValueError("point is singular mod p")
    c = (-(Q(x) // p) * mod_inverse(g[j], p)) % p
    w = list(x)
    w[j] += p * c
    assert Q(w) % (p * p) == 0
    return w


def _check_neighbor_input(Q, w, p):
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if len(w) != Q.n:
        raise ValueError("vector has the wrong length")
    if linalg.content(Q.hessian[i][j] for i in range(Q.n) for j in range(Q.n)) % p == 0:
        raise ValueError(f"Hessian scale is divisible by {p}")
    if all(t % p == 0 for t in w):
        raise ValueError("vector is not primitive mod p")
    if Q(w) % (p * p):
        raise ValueError("p^2 does not divide Q(w)")
    if all(t % p == 0 for t in linalg.matvec(Q.hessian, w)):
        raise ValueError("H w vanishes mod p; the neighbor would not have index p")


def neighbor_lattice(Q: QuadraticForm, w, p: int):
    """Basis of p L' for L' = w/p + {v : H(v, w) = 0 mod p}, as integer rows in Hermite form."""
    w = [int(t) for t in w]
    _check_neighbor_input(Q, w, p)
    n = Q.n
    g = [t % p for t in linalg.matvec(Q.hessian, w)]
    j = next(i for i, t in enumerate(g) if t)
    inv = mod_inverse(g[j], p)
    gens = [list(w)]
    for i in range(n):
        v = [0] * n
        if i == j:
            v[j] = p
        else:
            v[i] = 1
            v[j] = -(g[i] * inv) % p
        gens.append([p * t for t in v])
    return linalg.row_basis(gens, n)


def p_neighbor(Q: QuadraticForm, w, p: int, basis=False):
    """The p-neighbor of Q determined by w (p^2 | Q(w)).

    With ``basis=True`` also returns the rational basis of L' (rows) in
    the coordinates of Q.
    """
    B = neighbor_lattice(Q, w, p)
    G = linalg.matmul(linalg.matmul(B, Q.hessian), linalg.transpose(B))
    H = [[Fraction(x, p * p) for x in r] for r in G]
    N = QuadraticForm(linalg.integer_matrix(H))
    if basis:
        return N, [[Fraction(x, p) for x in r] for r in B]
    return N


@dataclass(frozen=True)
class Neighbor:
    point: tuple
    w: tuple
    form: QuadraticForm
    lattice_key: tuple


def all_p_neighbors(Q: QuadraticForm, p: int, detailed=False):
    """One neighbor per nonsingular projective zero of Q mod p."""
    _require_definite(Q)
    out = []
    seen = set()
    for x in isotropic_points_mod_p(Q, p):
        w = lift_isotropic_point(Q, x, p)
        B = neighbor_lattice(Q, w, p)
        key = tuple(map(tuple, B))
        if key in seen:
            raise AssertionError(f"two points gave the same {p}-neighbor")
        seen.add(key)
        N = p_neighbor(Q, w, p)
        out.append(Neighbor(x, tuple(w), N, key))
    return out if detailed else [nb.form for nb in out]


def good_primes(Q: QuadraticForm, count: int, exclude=()):
    """Smallest odd primes not dividing det H."""
    out = []
    p = 2
    while len(out) < count:
        p = next_prime(p)
        if Q.det_hessian % p and p not in exclude:
            out.append(p)
    return out


# ---------------------------------------------------------------- catalogs


@dataclass
class GenusCatalog:
    representatives: list
    aut_counts: list
    completeness: str
    primes_used: list
    proper_split: list = field(default_factory=list)

    @property
    def mass(self) -> Fraction:
        return sum((Fraction(1, a) for a in self.aut_counts), Fraction(0))

    @property
    def class_number(self) -> int:
        return len(self.representatives)

    def index_of(self, Q: QuadraticForm):
        for i, R in enumerate(self.representatives):
            if is_isometric_Z(R, Q) is not None:
                return i
        return None

    def to_json(self):
        m = self.mass
        return {
            "class_number": self.class_number,
            "representatives": [
                dict(R.to_json(), aut_count=a) for R, a in zip(self.representatives, self.aut_counts)
            ],
            "mass": {"num": m.numerator, "den": m.denominator, "decimal": float(m)},
            "completeness": self.completeness,
            "primes_used": list(self.primes_used),
        }


def _sort_key(Q):
    return (abs(Q.det_hessian), _theta_prefix(Q), Q.hessian)


class _Closure:
    def __init__(self, Q):
        R, _ = _reduced(Q)
        self.reps = [R]
        # reduced Hessians already placed; most neighbors reduce to one of these
        self.seen = {R: 0}

    def find(self, Q):
        if Q in self.seen:
            return self.seen[Q]
        for i, R in enumerate(self.reps):
            if is_isometric_Z(R, Q) is not None:
                self.seen[Q] = i
                return i
        return None

    def add(self, Q):
        R, _ = _reduced(Q)
        if self.find(R) is None:
            self.seen[R] = len(self.reps)
            self.reps.append(R)
            return True
        return False

    def close(self, primes, max_classes):
        done = {p: 0 for p in primes}
        grew = True
        while grew:
            grew = False
            for p in primes:
                while done[p] < len(self.reps):
                    R = self.reps[done[p]]
                    done[p] += 1
                    for N in all_p_neighbors(R, p):
                        if self.add(N):
                            grew = True
                            if len(self.reps) > max_classes:
                                return False
        return True


def genus_enumerate(Q: QuadraticForm, primes=None, target_mass=None, max_classes=200) -> GenusCatalog:
    """Classes in the genus of Q reached by repeated p-neighbor steps.

    The catalog is marked "verified" when it equals a supplied target
    mass, or, without a target, when one more neighbor round at two
    further good primes finds nothing new.  Otherwise "heuristic".
    """
    _require_definite(Q)
    if primes is None:
        primes = good_primes(Q, 2)
    primes = list(primes)
    for p in primes:
        if not isprime(p):
            raise ValueError(f"{p} is not prime")
    cl = _Closure(Q)
    finished = cl.close(primes, max_classes)
    used = list(primes)
    status = "heuristic"
    if finished:
        if target_mass is not None:
            got = sum(Fraction(1, automorphism_count(R)) for R in cl.reps)
            status = "verified" if got == Fraction(target_mass) else "heuristic"
        else:
            while True:
                extra = good_primes(Q, 2, exclude=used)
                before = len(cl.reps)
                for p in extra:
                    for R in list(cl.reps):
                        for N in all_p_neighbors(R, p):
                            cl.add(N)
                used += extra
                if len(cl.reps) == before:
                    status = "verified"
                    break
                if not cl.close(used, max_classes):
                    break
    reps = sorted(cl.reps, key=_sort_key)
    return GenusCatalog(
        representatives=reps,
        aut_counts=[automorphism_count(R) for R in reps],
        completeness=status,
        primes_used=used,
        proper_split=[Q.n % 2 == 0 and not has_improper_automorphism(R) for R in reps],
    )


def mass(catalog: GenusCatalog) -> Fraction:
    if catalog.completeness != "verified":
        warnings.warn("mass of a catalog that is not certified complete", RuntimeWarning)
    return catalog.mass


@dataclass
class NeighborGraph:
    p: int
    vertices: list
    edges: list  # (i, j, multiplicity)

    def degree(self, i):
        return sum(m for a, _, m in self.edges if a == i)

    @property
    def is_regular(self):
        return len({self.degree(i) for i in self.vertices}) <= 1

    def to_json(self):
        return {"p": self.p, "vertices": self.vertices, "edges": [list(e) for e in self.edges]}


def neighbor_graph(Q: QuadraticForm, p: int, catalog: GenusCatalog | None = None) -> NeighborGraph:
    """Weighted p-neighbor graph on the classes of the genus of Q."""
    if catalog is None:
        catalog = genus_enumerate(Q)
    edges = []
    for i, R in enumerate(catalog.representatives):
        counts = Counter()
        for N in all_p_neighbors(R, p):
            j = catalog.index_of(N)
            if j is None:
                raise ValueError(f"a {p}-neighbor left the catalog; it is incomplete")
            counts[j] += 1
        edges.extend((i, j, c) for j, c in sorted(counts.items()))
    return NeighborGraph(p, list(range(catalog.class_number)), edges)


def genus_symbol(Q: QuadraticForm):
    """Signature plus local Jordan invariants at p | 2 det; equal for forms in one genus."""
    return (Q.signature, tuple((p, tuple(jordan_invariants(Q, p))) for p in relevant_primes(Q)))
