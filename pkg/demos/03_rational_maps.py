"""
Rational maps over Q
====================

Maps are stored as coprime integer numerator and denominator with no
common content.
"""

from adelic_energy.maps import chebyshev, conjugate_power_map, iterate, lattes, normalize, reduction_datum, render
from adelic_energy.parser import parse_map

# common content and shared factors are removed on construction
print(render(normalize([2, 0, 2], [0, 4])))
print(render(normalize([-1, 0, 1], [-1, 1])))

# the example families
for name, f in [
    ("Chebyshev T3", chebyshev(3)),
    ("squaring conjugated by 2z + 1", conjugate_power_map(2, 2, 1)),
    ("Lattes (2, 3)", lattes(2, 3)),
]:
    print(f"{name:32} {render(f)}")

# maps can be typed as expressions or given as coefficient lists
f = parse_map("(x^2+6)^2/(4*x*(x-2)*(x+3))")
print("parsed expression equals lattes(2, 3):", f == lattes(2, 3))
print("coefficient object:", parse_map('{"num": [-2, 0, 1]}') == chebyshev(2))

# iteration multiplies degrees; the reduction datum locates bad primes
print("second iterate of T2:", render(iterate(chebyshev(2), 2)))
datum = reduction_datum(lattes(2, 3), with_primes=True)
print("resultant datum of lattes(2, 3):", datum.R, "bad primes:", datum.bad_primes.factors)
