from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from adelic_energy.errors import DegenerateMap, DegreeCapExceeded, InvalidInput
from adelic_energy.maps import (
    INFINITY,
    chebyshev,
    compose_maps,
    conjugate_power_map,
    evaluate,
    iterate,
    lattes,
    normalize,
    polynomial_map,
    projective_orbit,
    reduction_datum,
    render,
)

Z = sympy.symbols("z")


def as_sympy(f):
    return sum(c * Z**i for i, c in enumerate(f.P.coeffs)) / sum(c * Z**i for i, c in enumerate(f.Q.coeffs))


def test_normalize_clears_denominators_and_content():
    f = normalize([Fraction(1, 2), 0, Fraction(3, 4)], [Fraction(1, 4)])
    assert f.P.coeffs == (2, 0, 3) and f.Q.coeffs == (1,)
    g = normalize([0, 0, 2], [0, -2])
    assert g.P.coeffs == (0, -1) and g.Q.coeffs == (1,)
    h = normalize([6, 0, 6], [0, -4])
    assert h.Q.lead > 0 and (h.P.coeffs, h.Q.coeffs) == ((-3, 0, -3), (0, 2))


@pytest.mark.parametrize("num, den", [([1], [1]), ([0], [1]), ([1, 1], [0]), ([2, 2], [1, 1])])
def test_degenerate_maps_rejected(num, den):
    with pytest.raises(DegenerateMap):
        normalize(num, den)


def test_common_factors_cancel():
    f = normalize([-1, 0, 1], [-1, 1])
    assert (f.P.coeffs, f.Q.coeffs) == ((1, 1), (1,))


def test_families():
    assert chebyshev(2).P.coeffs == (-2, 0, 1)
    assert chebyshev(3).P.coeffs == (0, -3, 0, 1)
    f = lattes(1, 2)
    assert (f.P.coeffs, f.Q.coeffs) == ((4, 0, 4, 0, 1), (0, -8, 4, 4))
    assert conjugate_power_map(2, 2, 0).P.coeffs == (0, 0, 2)
    assert conjugate_power_map(2, 1, 1).P.coeffs == (0, 2, 1)
    inv = conjugate_power_map(-2, 1, 0)
    assert (inv.P.coeffs, inv.Q.coeffs) == ((1,), (0, 0, 1))
    with pytest.raises(InvalidInput):
        chebyshev(1)


@given(st.integers(-30, 30).filter(lambda t: t not in (2, -2)))
def test_chebyshev_semiconjugacy(t):
    # T_d(w + 1/w) = w^d + w^-d, checked at w = t/3
    w = Fraction(t, 3) if t else Fraction(5, 7)
    for d in (2, 3, 5):
        assert evaluate(chebyshev(d), w + 1 / w) == w**d + w ** (-d)


@pytest.mark.parametrize(
    "f",
    [chebyshev(2), normalize([1, 0, 1], [0, 2]), lattes(1, 2), polynomial_map([Fraction(1, 2), 0, 1])],
    ids=["T2", "joukowski", "lattes12", "z2+half"],
)
def test_iterate_matches_symbolic_composition(f):
    g = iterate(f, 2)
    want = sympy.cancel(as_sympy(f).subs(Z, as_sympy(f)))
    assert sympy.simplify(as_sympy(g) - want) == 0
    assert g == compose_maps(f, f)


def test_iterate_examples_and_cap():
    assert iterate(chebyshev(2), 2).P.coeffs == (2, 0, -4, 0, 1)
    f = iterate(normalize([1, 0, 1], [0, 2]), 2)
    assert (f.P.coeffs, f.Q.coeffs) == ((1, 0, 6, 0, 1), (0, 4, 0, 4))
    with pytest.raises(DegreeCapExceeded):
        iterate(polynomial_map([0, 0, 1]), 7)


def test_evaluate_projective_points():
    f = normalize([1, 0, 1], [0, 2])
    assert evaluate(f, 0) is INFINITY
    assert evaluate(f, INFINITY) is INFINITY
    assert evaluate(f, Fraction(1, 3)) == Fraction(5, 3)
    assert evaluate(chebyshev(2), 1j) == pytest.approx(-3)


def test_reduction_datum_examples():
    assert reduction_datum(polynomial_map([0, 0, Fraction(1, 2)])).R == 4
    assert reduction_datum(chebyshev(2)).R == 1
    d = reduction_datum(lattes(1, 1), with_primes=True)
    assert d.R == 2**12 and d.bad_primes.factors == ((2, 12),)
    d = reduction_datum(lattes(2, 3), with_primes=True)
    assert d.bad_primes.factors == ((2, 12), (3, 4), (5, 4))


def test_render():
    assert render(chebyshev(2)) == "z^2 - 2"
    assert render(normalize([1, 0, 1], [0, 2])) == "(z^2 + 1)/(2*z)"


def test_chain_evaluation_agrees_with_expanded_iterate():
    f = normalize([1, 3, -2], [2, 0, 1])
    g = iterate(f, 3)
    expanded = f.__class__(g.P, g.Q)
    pts = np.array([0.3 + 0.1j, -2.0, 1.5j, 7.0 - 3.0j])
    ones = np.ones_like(pts)
    A1, B1, L1, _, _ = projective_orbit(g, pts, ones)
    A2, B2, L2, _, _ = projective_orbit(expanded, pts, ones)
    assert np.allclose(A1 * np.exp(L1), A2 * np.exp(L2), rtol=1e-10)
    assert np.allclose(B1 * np.exp(L1), B2 * np.exp(L2), rtol=1e-10)
