"""Clifford algebra of a rational quadratic form, reflections and spinor norms.

Elements are dictionaries from increasing index tuples (blades) to
Fractions.  Products are normalized with e_j e_i = H_ij - e_i e_j for
i < j and e_i e_i = Q(e_i), so the basis need not be orthogonal.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from itertools import combinations

from . import linalg
from .arith import as_fraction, squarefree_part
from .forms import QuadraticForm


class CliffordError(ValueError):
    pass


@lru_cache(maxsize=None)
def _times_generator(H, blade, j):
    """blade * e_j as a tuple of (blade, coefficient) pairs."""
    if not blade:
        return (((j,), 1),)
    last, rest = blade[-1], blade[:-1]
    if last < j:
        return ((blade + (j,), 1),)
    if last == j:
        return ((rest, H[j][j] // 2),)
    # rest e_last e_j = H[last][j] rest - (rest e_j) e_last
    out = {}
    if H[last][j]:
        out[rest] = H[last][j]
    for b, c in _times_generator(H, rest, j):
        for b2, c2 in _times_generator(H, b, last):
            out[b2] = out.get(b2, 0) - c * c2
    return tuple((b, c) for b, c in out.items() if c)


@lru_cache(maxsize=None)
def _blade_product(H, a, b):
    cur = {a: 1}
    for j in b:
        nxt = {}
        for blade, c in cur.items():
            for b2, c2 in _times_generator(H, blade, j):
                nxt[b2] = nxt.get(b2, 0) + c * c2
        cur = {k: v for k, v in nxt.items() if v}
    return tuple(cur.items())


@lru_cache(maxsize=None)
def _blade_reverse(H, blade):
    return _blade_product(H, (), tuple(reversed(blade)))


class CliffordElement:
    """Immutable element of C(V) for a fixed integral form."""

    __slots__ = ("form", "_c")

    def __init__(self, form: QuadraticForm, coeffs=None):
        self.form = form
        c = {}
        for k, v in (coeffs or {}).items():
            k = tuple(k)
            if list(k) != sorted(set(k)) or any(not 0 <= i < form.n for i in k):
                raise CliffordError(f"bad blade {k}")
            v = as_fraction(v)
            if v:
                c[k] = v
        self._c = c

    @classmethod
    def _raw(cls, form, c):
        obj = cls.__new__(cls)
        obj.form = form
        obj._c = {k: v for k, v in c.items() if v}
        return obj

    @classmethod
    def scalar(cls, form, a=1):
        return cls(form, {(): a})

    @classmethod
    def vector(cls, form, v):
        if len(v) != form.n:
            raise CliffordError("vector has the wrong length")
        return cls(form, {(i,): x for i, x in enumerate(v)})

    @classmethod
    def basis(cls, form, blade):
        return cls(form, {tuple(blade): 1})

    @property
    def coefficients(self):
        return dict(self._c)

    @property
    def parity(self):
        kinds = {len(k) % 2 for k in self._c}
        if kinds == {1}:
            return "odd"
        if kinds <= {0}:
            return "even"
        return "mixed"

    def grade(self, k):
        return CliffordElement._raw(self.form, {b: v for b, v in self._c.items() if len(b) == k})

    @property
    def is_scalar(self):
        return all(len(k) == 0 for k in self._c)

    def scalar_part(self) -> Fraction:
        return self._c.get((), Fraction(0))

    def as_vector(self):
        if any(len(k) != 1 for k in self._c):
            raise CliffordError("element is not a vector")
        return [self._c.get((i,), Fraction(0)) for i in range(self.form.n)]

    def _check(self, other):
        if not isinstance(other, CliffordElement):
            return CliffordElement.scalar(self.form, other)
        if other.form != self.form:
            raise CliffordError("elements live over different forms")
        return other

    def __add__(self, other):
        other = self._check(other)
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return CliffordElement._raw(self.form, c)

    __radd__ = __add__

    def __neg__(self):
        return CliffordElement._raw(self.form, {k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        if not isinstance(other, CliffordElement):
            a = as_fraction(other)
            return CliffordElement._raw(self.form, {k: a * v for k, v in self._c.items()})
        return clifford_multiply(self, other)

    def __rmul__(self, other):
        a = as_fraction(other)
        return CliffordElement._raw(self.form, {k: a * v for k, v in self._c.items()})

    def __truediv__(self, other):
        return self * (1 / as_fraction(other))

    def __eq__(self, other):
        if not isinstance(other, CliffordElement):
            other = CliffordElement.scalar(self.form, other)
        return self.form == other.form and self._c == other._c

    def __hash__(self):
        return hash((self.form, frozenset(self._c.items())))

    def __repr__(self):
        if not self._c:
            return "0"
        terms = []
        for k in sorted(self._c, key=lambda b: (len(b), b)):
            name = "*".join(f"e{i + 1}" for i in k)
            terms.append(f"{self._c[k]}*{name}" if name else str(self._c[k]))
        return " + ".join(terms)


def clifford_multiply(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    b = a._check(b)
    H = a.form._h
    out = {}
    for ka, va in a._c.items():
        for kb, vb in b._c.items():
            for k, c in _blade_product(H, ka, kb):
                out[k] = out.get(k, 0) + va * vb * c
    return CliffordElement._raw(a.form, out)


def reverse(a: CliffordElement) -> CliffordElement:
    """Anti-automorphism reversing every product of vectors."""
    H = a.form._h
    out = {}
    for k, v in a._c.items():
        for k2, c in _blade_reverse(H, k):
            out[k2] = out.get(k2, 0) + v * c
    return CliffordElement._raw(a.form, out)


def clifford_norm(a: CliffordElement) -> CliffordElement:
    """a * reverse(a); a scalar for products of vectors."""
    return a * reverse(a)


def all_blades(n):
    return [b for k in range(n + 1) for b in combinations(range(n), k)]


# ---------------------------------------------------------------- orthogonal maps


class OrthogonalMap:
    """Rational matrix sigma with sigma^t H sigma = H."""

    def __init__(self, matrix, form: QuadraticForm, check=True):
        self.form = form
        self.matrix = [[as_fraction(x) for x in r] for r in matrix]
        if len(self.matrix) != form.n or any(len(r) != form.n for r in self.matrix):
            raise CliffordError("matrix has the wrong size")
        if check and linalg.congruence(self.matrix, form.hessian) != [[Fraction(x) for x in r] for r in form.hessian]:
            raise CliffordError("matrix does not preserve the form")

    def __call__(self, v):
        return linalg.matvec(self.matrix, [as_fraction(x) for x in v])

    def __matmul__(self, other):
        if other.form != self.form:
            raise CliffordError("maps over different forms")
        return OrthogonalMap(linalg.matmul(self.matrix, other.matrix), self.form, check=False)

    def __eq__(self, other):
        return isinstance(other, OrthogonalMap) and self.form == other.form and self.matrix == other.matrix

    @property
    def det(self) -> int:
        return int(linalg.det_rational(self.matrix))

    def is_identity(self):
        return self.matrix == linalg.identity(self.form.n)

    @classmethod
    def identity(cls, form):
        return cls(linalg.identity(form.n), form, check=False)

    def __repr__(self):
        return f"OrthogonalMap({[[str(x) for x in r] for r in self.matrix]})"


def _q(form, v):
    # Q on rational vectors
    H = form._h
    return sum(v[i] * H[i][j] * v[j] for i in range(form.n) for j in range(form.n)) / 2


def _h(form, v, w):
    H = form._h
    return sum(v[i] * H[i][j] * w[j] for i in range(form.n) for j in range(form.n) if v[i] and w[j])


def reflection(v, form: QuadraticForm) -> OrthogonalMap:
    """tau_v(w) = w - H(v, w)/Q(v) v."""
    v = [as_fraction(x) for x in v]
    if len(v) != form.n:
        raise CliffordError("vector has the wrong length")
    qv = _q(form, v)
    if qv == 0:
        raise CliffordError("reflection in an isotropic vector")
    Hv = linalg.matvec(form.hessian, v)
    n = form.n
    M = [[Fraction(int(i == j)) - v[i] * Hv[j] / qv for j in range(n)] for i in range(n)]
    return OrthogonalMap(M, form, check=False)


def reflection_product(vectors, form):
    out = OrthogonalMap.identity(form)
    for v in vectors:
        out = out @ reflection(v, form)
    return out


def _anisotropic_in(form, basis, order):
    for i in order:
        if _q(form, basis[i]) != 0:
            return basis[i]
    for i in order:
        for j in order:
            if i < j:
                v = [a + b for a, b in zip(basis[i], basis[j])]
                if _q(form, v) != 0:
                    return v
    raise CliffordError("form is degenerate on the working subspace")


def _primitive(v):
    """Integral primitive multiple of a rational vector (same reflection)."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = linalg.content(ints)
    return [Fraction(x // g) for x in ints]


def decompose_into_reflections(sigma: OrthogonalMap, strategy="first"):
    """Vectors v_1..v_k with sigma = tau_{v_1} ... tau_{v_k}, k <= 2n.

    Induction on dimension: move an anisotropic v to sigma(v) with at most
    two reflections, then recurse on the orthogonal complement of v.
    ``strategy`` changes which v is used and how ties are broken
    ("first", "last", "plus"); every strategy gives a valid word.
    """
    form = sigma.form
    if form.is_degenerate:
        raise CliffordError("form is degenerate")
    if not isinstance(sigma, OrthogonalMap):
        raise CliffordError("expected an OrthogonalMap")
    n = form.n
    basis = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    cur = sigma
    word = []
    while basis:
        order = list(range(len(basis)))
        if strategy == "last":
            order.reverse()
        if all(cur(b) == b for b in basis):
            break
        v = _anisotropic_in(form, basis, order)
        w = cur(v)
        step = []
        if w != v:
            d = [a - b for a, b in zip(v, w)]
            s = [a + b for a, b in zip(v, w)]
            use_minus = _q(form, d) != 0
            if strategy == "plus" and _q(form, s) != 0:
                use_minus = False
            # tau_{v-w} v = w;  tau_w tau_{v+w} v = w
            step = [_primitive(d)] if use_minus else [_primitive(w), _primitive(s)]
        inv = reflection_product(list(reversed(step)), form)
        cur = inv @ cur
        word += step
        # complement of v inside the span of the basis
        row = [[_h(form, v, b) for b in basis]]
        coeffs = linalg.nullspace(row, len(basis))
        basis = [[sum(c[k] * basis[k][i] for k in range(len(basis))) for i in range(n)] for c in coeffs]
    if reflection_product(word, form) != sigma:
        raise AssertionError("reflection word does not reproduce the map")
    return word


def word_norm(vectors, form) -> Fraction:
    out = Fraction(1)
    for v in vectors:
        out *= _q(form, [as_fraction(x) for x in v])
    return out


def spinor_norm(sigma: OrthogonalMap, strategy="first") -> int:
    """Squarefree representative of prod Q(v_i) over a reflection word for sigma.

    Also defined here for det = -1 maps; see :func:`spinor_norm_report`.
    """
    return squarefree_part(word_norm(decompose_into_reflections(sigma, strategy), sigma.form))


def spinor_norm_report(sigma: OrthogonalMap) -> dict:
    word = decompose_into_reflections(sigma)
    return {
        "spinor_norm": squarefree_part(word_norm(word, sigma.form)),
        "det": sigma.det,
        "reflections": [[{"num": x.numerator, "den": x.denominator} for x in v] for v in word],
    }


def conjugation_action(u, x, form: QuadraticForm | None = None):
    """u^{-1} x u computed in the Clifford algebra, returned as a vector.

    ``u`` and ``x`` may be CliffordElements or coordinate vectors (then
    ``form`` is required).  Equals -tau_u(x).
    """
    if not isinstance(u, CliffordElement):
        u = CliffordElement.vector(form, u)
    if not isinstance(x, CliffordElement):
        x = CliffordElement.vector(u.form, x)
    N = clifford_norm(u)
    if not N.is_scalar or N.scalar_part() == 0:
        raise CliffordError("u must be an anisotropic vector")
    u_inv = reverse(u) / N.scalar_part()
    return (u_inv * x * u).as_vector()
