"""First-order error bounds: sup error <= C(r, A, M)/n, derivatives included.

For f(z) = exp(z/2) the envelope is (M, A) = (1, 1/2) and at r = 1 the
explicit constant is C = 6.  The measured sup errors sit well inside the
bound, and the same happens for derivative errors through the Cauchy-type
constant p! r1 C(r1) / (n (r1 - r)^(p+1)).
"""

import math
from fractions import Fraction

from bsdop import (
    approximation_error,
    derivative_approximation_error,
    exponential,
    upper_bound_constant,
)

f = exponential(Fraction(1, 2))
r = 1.0
c1 = upper_bound_constant(1, Fraction(1, 2), r)
print(f"function {f.label}, r = {r}, explicit constant C = {c1}")
print()
print(f"{'n':>6} {'sup error':>14} {'C/n':>12} {'ratio':>8}")
for n in (8, 32, 128, 512):
    err = approximation_error(f, n, r)
    print(f"{n:>6} {err:>14.6e} {c1 / n:>12.4e} {err / (c1 / n):>8.4f}")

print()
print("Derivative approximation on |z| <= 1, transferred from r1 = 1.5:")
r1 = 1.5
c1_r1 = upper_bound_constant(1, Fraction(1, 2), r1)
for p in (1, 2):
    print(f"  order p = {p}:")
    for n in (8, 64, 512):
        err = derivative_approximation_error(f, n, p, r, r1)
        bound = math.factorial(p) * r1 * c1_r1 / (n * (r1 - r) ** (p + 1))
        print(f"    n={n:<5} error {err:.6e}  <=  bound {bound:.6e}")
