"""Intervals as truth values, and how to totally order them.

Interval-valued memberships produce interval-valued class scores, so ranking
predictions needs an order on intervals. The product order ([a,b] <= [c,d]
iff a <= c and b <= d) is only partial: [0.2, 0.9] and [0.4, 0.5] are
incomparable. The admissible order fixes that by projecting each interval to
a scalar with K_a(x) = (1-a)*lower + a*upper and comparing lexicographically
through two projections (alpha first, beta for ties).
"""

import numpy as np

from conformal_frbc import Interval, OrderParams, k_a, leq_admissible
from conformal_frbc.intervals import sort_pairs

x = Interval(0.2, 0.9)
y = Interval(0.4, 0.5)

print("Two overlapping intervals the product order cannot rank:")
print(f"  x = [{x.lower}, {x.upper}]   y = [{y.lower}, {y.upper}]")
print(f"  K_0   (endpoints):  x -> {k_a(x, 0.0):.2f},  y -> {k_a(y, 0.0):.2f}")
print(f"  K_0.5 (midpoints):  x -> {k_a(x, 0.5):.2f},  y -> {k_a(y, 0.5):.2f}")
print(f"  K_1   (uppers):     x -> {k_a(x, 1.0):.2f},  y -> {k_a(y, 1.0):.2f}")
print()

order = OrderParams(alpha=0.5, beta=1.0)
print(f"Midpoint-first order (alpha=0.5, beta=1.0): x <= y ? {leq_admissible(x, y, order)}")
print(f"Lower-endpoint-first order (alpha=0, beta=1): x <= y ? "
      f"{leq_admissible(x, y, OrderParams(0.0, 1.0))}")
print()

# Ties in the primary projection fall through to the secondary one.
a, b = Interval(0.3, 0.5), Interval(0.2, 0.6)
print(f"a = [0.3, 0.5] and b = [0.2, 0.6] share the midpoint {k_a(a, 0.5)}")
print(f"  beta=1 breaks the tie by upper endpoint: a <= b ? {leq_admissible(a, b, order)}")
print()

# Sorting a pool of interval scores is what conformal calibration does.
rng = np.random.default_rng(0)
pool = np.sort(rng.random((6, 2)), axis=1)
print("A random score pool, sorted under the admissible order:")
for lo, up in sort_pairs(pool, order):
    print(f"  [{lo:.3f}, {up:.3f}]  (midpoint {0.5 * (lo + up):.3f})")
