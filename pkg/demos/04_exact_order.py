"""The exact 1/n order: two-sided evidence from a convergence study.

For any f that is not a polynomial of degree <= 1 the error decays exactly
like 1/n: n * error converges to the sup of z(z+2)f''(z)/2, which for
exp(z/2) on the unit circle is 3 sqrt(e) / 8 = 0.61827...  The log-log
slope over a geometric n grid lands on -1 and the ratio against the limit
object tends to 1 from above.
"""

import math
from fractions import Fraction

from bsdop import asymptotic_ratio, convergence_study, estimate_order, exponential

f = exponential(Fraction(1, 2))
ns = [64, 128, 256, 512, 1024, 2048]
table = convergence_study(f, 1.0, ns)

limit = 3 * math.exp(0.5) / 8
print(f"limit of n * error: 3 sqrt(e)/8 = {limit:.10f}")
print()
print(f"{'n':>6} {'sup error':>14} {'n * error':>12} {'bound C/n':>12}")
for row in table.rows:
    print(f"{row.n:>6} {row.sup_error:>14.6e} {row.n_error:>12.8f} {row.bound_thm1:>12.6e}")

fit = estimate_order(table)
print()
print(f"log-log slope: {fit.slope:.5f}   (R^2 = {fit.r_squared:.8f})")
ratio = asymptotic_ratio(f, 1.0, 2048)
print(f"ratio n*error / limit at n = 2048: {ratio:.6f}")
print()
print("CSV of the same table (what the converge command writes):")
print(table.to_csv())
