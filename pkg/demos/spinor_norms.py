"""Reflections, the Clifford algebra and spinor norms on x^2 + xy + y^2 and x^2 + 2y^2 + 3z^2."""

from quadforms import CliffordElement, QuadraticForm, decompose_into_reflections, diagonal, reflection
from quadforms.clifford import conjugation_action, reflection_product, spinor_norm, word_norm

hexf = QuadraticForm([[2, 1], [1, 2]])
e1, e2 = CliffordElement.basis(hexf, (0,)), CliffordElement.basis(hexf, (1,))
print("e1 e2 + e2 e1 =", e1 * e2 + e2 * e1)
print("e1 e2 e1 =", e1 * e2 * e1)

u, x = [1, 1], [2, -1]
lhs = [str(t) for t in conjugation_action(u, x, hexf)]
rhs = [str(-t) for t in reflection(u, hexf)(x)]
print(f"\nu^-1 x u = {lhs}  vs  -tau_u(x) = {rhs}")

Q = diagonal(1, 2, 3)
word = [[1, 1, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]]
sigma = reflection_product(word, Q)
print("\nsigma =", [[str(t) for t in r] for r in sigma.matrix], "det", sigma.det)
for strategy in ("first", "last", "plus"):
    dec = decompose_into_reflections(sigma, strategy)
    print(f"  {strategy:5s}: {[[str(t) for t in v] for v in dec]}  prod Q = {word_norm(dec, Q)}  sn = {spinor_norm(sigma, strategy)}")
print("  original word: prod Q =", word_norm(word, Q))
