"""
Norms of canonical measures
===========================

Three independent estimates: a rigorous-style enclosure from iterated
pull-backs, inverse-iteration Monte Carlo, and averages over periodic points.
"""

import math

from adelic_energy.maps import chebyshev, polynomial_map
from adelic_energy.norms import (
    az_pairing,
    chebyshev_norm_value,
    enclosure_levels,
    intersect_levels,
    lattes_lower_check,
    norm_monte_carlo,
    norm_small_points,
    verify_explicit_bounds,
)

T2 = chebyshev(2)
print("closed form for z^2 - 2:", chebyshev_norm_value())

# each level gives an interval; deeper iterates tighten it
levels = enclosure_levels(T2, depth=3)
for lvl in levels:
    print(f"  level {lvl.n}: [{lvl.interval.lo:.6f}, {lvl.interval.hi:.6f}]")
print("intersection:", intersect_levels(levels))

value, stderr = norm_monte_carlo(T2, samples=100_000, seed=1)
print(f"Monte Carlo: {value:.5f} +- {stderr:.5f}")

sp = norm_small_points(T2, 8)
print("periodic-point averages by period:", [round(v, 8) for _, v in sp.trend])

# pairing against the unit circle, estimated on periodic points of T2
rep = az_pairing(T2, polynomial_map([0, 0, 1]), symmetric=True)
print("pairing:", rep.estimate, "with roles swapped:", rep.symmetric_check)

# explicit two-sided bounds in terms of the map height
print(verify_explicit_bounds(T2))

# Lattes maps stay above log(ab)
rep = lattes_lower_check(2, 3)
print(f"Lattes (2,3): enclosure.hi {rep.enclosure.hi:.4f}, small points {rep.small_points:.4f}, log 6 = {math.log(6):.4f}")
