"""
Naive, Arakelov and canonical heights
=====================================
"""

from fractions import Fraction

from adelic_energy.heights import AlgebraicOrbit, arakelov_height, canonical_height, check_height_inequalities, naive_height
from adelic_energy.maps import chebyshev, polynomial_map

x = Fraction(2, 3)
print("naive height of 2/3:   ", naive_height(x).value)
print("Arakelov height of 2/3:", arakelov_height(x).value)

# a Galois orbit is given by its integer minimal polynomial
golden = AlgebraicOrbit.from_coeffs([-1, -1, 1])
print("naive height of the golden orbit:", naive_height(golden).value)

# the three inequalities between the two heights, with their slacks
print(check_height_inequalities(x).slacks)

# canonical heights by telescoping 2^-m h(g^m(x))
h = canonical_height(polynomial_map([1, 0, 1]), 0)
print(f"canonical height of 0 under z^2 + 1: {h.value:.15f} (error {h.error_estimate:.1e})")

# preperiodic points have canonical height zero, but the telescope approaches it slowly
h = canonical_height(chebyshev(2), 2, m_max=10)
print("canonical height of 2 under z^2 - 2:", h.value, h.flags)
