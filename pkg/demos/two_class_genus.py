"""A genus with two classes: x^2 + y^2 + 7z^2.

Neighbors at p = 3 reach the second class; the Eisenstein part is the
genus average and the remainder is a cusp form whose weighted sum over
the genus vanishes.
"""

from fractions import Fraction

from quadforms import diagonal, genus_enumerate, neighbor_graph
from quadforms.theta import cusp_coefficients, theta_coefficients

Q = diagonal(1, 1, 7)
cat = genus_enumerate(Q)
print(f"class number {cat.class_number}, mass {cat.mass} ({cat.completeness}, primes {cat.primes_used})")
for R, a in zip(cat.representatives, cat.aut_counts):
    print(f"  {R.hessian}  |Aut| = {a}")

g = neighbor_graph(Q, 3, cat)
print("\n3-neighbor graph (i, j, multiplicity):", g.edges)
print("regular:", g.is_regular)

M = 20
print("\n  m " + "".join(f"  r_{i}  a_C{i}" for i in range(cat.class_number)) + "  weighted")
series = [theta_coefficients(R, M).coefficients for R in cat.representatives]
cusps = [cusp_coefficients(R, M, cat) for R in cat.representatives]
for m in range(M + 1):
    cols = "".join(f" {s[m]:4d} {str(c[m]):>5}" for s, c in zip(series, cusps))
    w = sum(Fraction(c[m], a) for c, a in zip(cusps, cat.aut_counts))
    print(f"{m:3d}{cols}  {w}")
