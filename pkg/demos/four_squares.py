"""Sums of four squares three ways.

r(m) for x^2+y^2+z^2+w^2 from lattice enumeration, from the genus average
(the genus has one class) and from the product of local densities, next to
Jacobi's divisor sum.
"""

from quadforms import genus_enumerate, jacobi_r4, local_density_infty, local_density_p, sum_of_squares
from quadforms.densities import UnsupportedError, eisenstein_series_genus_avg, four_squares_product
from quadforms.theta import enumerate_representations

Q = sum_of_squares(4)

print("local densities at m = 6")
for p in (2, 3, 5, 7):
    print(f"  beta_{p}(6) = {local_density_p(Q, 6, p).value.rational()}")
b = local_density_infty(Q, 6).value
print(f"  beta_inf(6) = {b.coef} * pi^{b.pi_exp}")

cat = genus_enumerate(Q)
print(f"\ngenus: {cat.class_number} class, |Aut| = {cat.aut_counts[0]}, mass = {cat.mass} ({cat.completeness})")

avg = eisenstein_series_genus_avg(cat, 40)
print("\n  m  enum  genus  product  jacobi")
for m in range(1, 41):
    try:
        prod = four_squares_product(m).value.rational()
    except UnsupportedError:
        prod = "-"  # closed form needs squarefree m
    print(f"{m:3d} {enumerate_representations(Q, m):5d} {str(avg[m]):>6} {str(prod):>8} {jacobi_r4(m):7d}")
