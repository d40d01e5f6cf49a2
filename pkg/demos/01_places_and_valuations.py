"""
Places, valuations and the product formula
==========================================

Every nonzero rational has a log-absolute value at each place of Q.
Their sum is zero.
"""

from fractions import Fraction

from adelic_energy.exact import ARCHIMEDEAN, Place, factorize, log_abs, prime_support, product_formula_residual

x = Fraction(2**100, 3**99)

# the places that see x: the real one and the primes dividing it
places = [ARCHIMEDEAN] + [Place.prime(p) for p in prime_support(x)]
for v in places:
    print(f"{str(v):>12}  log|x|_v = {log_abs(x, v): .6f}")

# the contributions cancel up to rounding
print("sum over places:", product_formula_residual(x))

# factorization runs Pollard rho behind trial division
print(factorize(2**64 + 1))
