"""
Integer polynomials: resultants, roots and Mahler measure
=========================================================
"""

import numpy as np

from adelic_energy.polynomials import IntegerPolynomial, complex_roots, compose, image_polynomial, mahler_log, resultant

# coefficients run from the constant term upward
F = IntegerPolynomial([-1, 0, 1])
G = IntegerPolynomial([1, 0, 1])
print("Res(z^2 - 1, z^2 + 1) =", resultant(F, G))

# the golden-ratio polynomial has log Mahler measure log(phi)
golden = IntegerPolynomial([-1, -1, 1])
print("log M(z^2 - z - 1) =", mahler_log(golden), " log(phi) =", np.log((1 + 5**0.5) / 2))

# composing z^2 - 2 with itself gives the fourth Chebyshev polynomial
T2 = IntegerPolynomial([-2, 0, 1])
T4 = compose(T2, T2)
print("T2(T2(z)) coefficients:", T4.coeffs)
print("its roots:", np.sort(complex_roots(T4).roots.real))

# pushing the roots of z^2 + 1 through squaring: both land on -1
print("image of z^2 + 1 under z^2:", image_polynomial(G, IntegerPolynomial([0, 0, 1]), IntegerPolynomial([1])).coeffs)
