"""Exact integer/rational matrix routines.

Matrices are lists of rows.  Entries are ``int`` or ``Fraction``; nothing
here ever touches floating point.
"""

from fractions import Fraction
from math import gcd


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(r) for r in zip(*A)] if A else []


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A, x):
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def congruence(M, H):
    """Return M^t H M."""
    return matmul(transpose(M), matmul(H, M))


def det_bareiss(A) -> int:
    """Fraction-free determinant of an integer matrix."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(map(int, r)) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def det_rational(A) -> Fraction:
    n = len(A)
    M = [[Fraction(x) for x in r] for r in A]
    d = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            d = -d
        d *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            if f:
                for j in range(k, n):
                    M[i][j] -= f * M[k][j]
    return d


def inverse(A):
    """Rational inverse by Gauss-Jordan; raises on singular input."""
    n = len(A)
    M = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[k], M[piv] = M[piv], M[k]
        inv = 1 / M[k][k]
        M[k] = [x * inv for x in M[k]]
        for i in range(n):
            if i != k and M[i][k] != 0:
                f = M[i][k]
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return [r[n:] for r in M]


def nullspace(A, ncols=None):
    """Rational basis (list of vectors) of {x : A x = 0}."""
    if not A:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    m, n = len(A), len(A[0])
    M = [[Fraction(x) for x in r] for r in A]
    pivots = []
    row = 0
    for col in range(n):
        piv = next((i for i in range(row, m) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = 1 / M[row][col]
        M[row] = [x * inv for x in M[row]]
        for i in range(m):
            if i != row and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -M[r][fcol]
        basis.append(v)
    return basis


def row_basis(rows, n):
    """Integer basis (echelon rows) of the Z-span of integer row vectors.

    Plain row-style Hermite reduction with extended gcd steps; the
    result spans the same lattice as ``rows``.
    """
    work = [list(map(int, r)) for r in rows if any(r)]
    basis = []
    for col in range(n):
        live = [r for r in work if r[col] != 0]
        rest = [r for r in work if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            head = live[0]
            nxt = []
            for r in live[1:]:
                q = r[col] // head[col]
                r = [a - q * b for a, b in zip(r, head)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = [head] + nxt
        if live:
            head = live[0]
            if head[col] < 0:
                head = [-a for a in head]
            basis.append(head)
        work = rest
    # reduce entries above pivots for a canonical Hermite form
    for i in range(len(basis)):
        col = next(c for c in range(n) if basis[i][c] != 0)
        for k in range(i):
            q = basis[k][col] // basis[i][col]
            if q:
                basis[k] = [a - q * b for a, b in zip(basis[k], basis[i])]
    return basis


def symmetric_diagonalize(H):
    """Diagonalize a symmetric rational matrix by congruence.

    Returns ``(diag, M)`` with ``M^t H M = diag(diag)``; ``M`` is rational
    and invertible.  Zero entries of ``diag`` appear only for degenerate
    input.
    """
    n = len(H)
    A = [[Fraction(x) for x in r] for r in H]
    M = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add_col(dst, src, f):
        # basis vector dst += f * basis vector src
        for r in range(n):
            M[r][dst] += f * M[r][src]
        for r in range(n):
            A[r][dst] += f * A[r][src]
        for c in range(n):
            A[dst][c] += f * A[src][c]

    for k in range(n):
        if A[k][k] == 0:
            j = next((j for j in range(k + 1, n) if A[j][j] != 0), None)
            if j is not None:
                for r in range(n):
                    M[r][k], M[r][j] = M[r][j], M[r][k]
                A[k], A[j] = A[j], A[k]
                for r in A:
                    r[k], r[j] = r[j], r[k]
            else:
                j = next((j for j in range(k + 1, n) if A[k][j] != 0), None)
                if j is None:
                    continue
                add_col(k, j, Fraction(1))
        for j in range(k + 1, n):
            if A[k][j] != 0:
                add_col(j, k, -A[k][j] / A[k][k])
    return [A[i][i] for i in range(n)], M


def lll_reduce(G, delta=Fraction(3, 4)):
    """LLL-reduce a positive definite Gram matrix.

    Returns ``U`` unimodular with ``U^t G U`` reduced.  Incremental
    Gram-Schmidt updates (Cohen, Alg. 2.6.3); floating point for small
    entries, exact rationals otherwise.
    """
    n = len(G)
    U = identity(n)
    G = [[Fraction(x) for x in r] for r in G]
    # U stays unimodular whatever mu is, so floats are safe when entries are small
    if n <= 12 and all(abs(x) < 2**24 for r in G for x in r):
        G = [[float(x) for x in r] for r in G]
        num = float
        delta = float(delta)
    else:
        num = Fraction
    mu = [[num(0)] * n for _ in range(n)]
    B = [num(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = (G[i][j] - sum(mu[j][t] * mu[i][t] * B[t] for t in range(j))) / B[j]
        B[i] = G[i][i] - sum(mu[i][t] ** 2 * B[t] for t in range(i))

    def red(k, l):
        if abs(mu[k][l]) * 2 <= 1:
            return
        q = int(round(mu[k][l]))
        for r in range(n):
            U[r][k] -= q * U[r][l]
        mu[k][l] -= q
        for i in range(l):
            mu[k][i] -= q * mu[l][i]

    def swap(k):
        for r in range(n):
            U[r][k], U[r][k - 1] = U[r][k - 1], U[r][k]
        for j in range(k - 1):
            mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
        m = mu[k][k - 1]
        Bn = B[k] + m * m * B[k - 1]
        mu[k][k - 1] = m * B[k - 1] / Bn
        B[k] = B[k - 1] * B[k] / Bn
        B[k - 1] = Bn
        for i in range(k + 1, n):
            t = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m * t
            mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]

    k = 1
    while k < n:
        red(k, k - 1)
        if B[k] < (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            swap(k)
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return U


def integer_matrix(A):
    out = []
    for r in A:
        row = []
        for x in r:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError("matrix is not integral")
            row.append(x.numerator)
        out.append(row)
    return out


def content(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
