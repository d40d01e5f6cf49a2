"""
Local energies of pull-back measures
====================================

The chordal kernel, Jensen integrals and the pull-back of the Arakelov
measure, place by place.
"""

import math

from adelic_energy.exact import Place
from adelic_energy.local_energy import (
    WeightedPointMeasure,
    arch_jensen_quadrature,
    chordal_log,
    discrete_energy,
    jensen_integral,
    pullback_energy_global,
    pullback_measure,
    pushforward_measure,
    standard_measure_energy,
)
from adelic_energy.maps import chebyshev, lattes

print("chordal log distance 0 to 1:", chordal_log(0, 1), "=", 0.5 * math.log(2))
print("2-adic distance 0 to 4:     ", chordal_log(0, 4, Place.prime(2)))

# Jensen integrals: closed form against sphere quadrature
print("Jensen(3, 4):", jensen_integral(3, 4), arch_jensen_quadrature(3, 4))

# the unit-circle measure has energy log 2
print("unit-circle energy:", standard_measure_energy())

# per-place breakdown of the pull-back energy; bad primes contribute
br = pullback_energy_global(lattes(2, 3))
for place, value, err in br.per_place:
    print(f"  {str(place):>12}: {value:.10f}")
print("sum", br.total, "shortcut", br.shortcut)

# pull-back and push-forward are adjoint for the pairing
mu = WeightedPointMeasure(((0, 1.0), (3, -1.0)))
nu = WeightedPointMeasure(((1, 0.5), (-5, -0.5)))
f = chebyshev(2)
print(discrete_energy(pullback_measure(f, mu), nu), discrete_energy(mu, pushforward_measure(f, nu)))
