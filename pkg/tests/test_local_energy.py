import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adelic_energy.errors import InvalidInput, QuadratureError
from adelic_energy.exact import ARCHIMEDEAN, Place
from adelic_energy.local_energy import (
    HALF_LOG2,
    SphereQuadrature,
    WeightedPointMeasure,
    arch_jensen_quadrature,
    arch_pullback_integral,
    chordal_log,
    discrete_energy,
    jensen_integral,
    outer_log_modulus_integral,
    pullback_energy_global,
    pullback_energy_local,
    pullback_measure,
    pullback_points,
    pushforward_measure,
    refine,
    standard_measure_energy,
)
from adelic_energy.maps import INFINITY, chebyshev, lattes, normalize, polynomial_map

LOG2 = math.log(2)
small_rationals = st.fractions(max_denominator=60).filter(lambda q: abs(q) < 60)


def test_chordal_kernel_examples():
    assert chordal_log(0, INFINITY) == 0.0
    assert chordal_log(0, 1) == pytest.approx(0.5 * LOG2)
    assert chordal_log(1, 1) == math.inf
    assert chordal_log(0j, 1j) == pytest.approx(0.5 * LOG2)
    # 2-adic distance between 0 and 4 is |4|_2
    assert chordal_log(0, 4, Place.prime(2)) == pytest.approx(2 * LOG2)
    assert chordal_log(Fraction(1, 2), 0, Place.prime(2)) == 0.0


@given(small_rationals, small_rationals)
def test_chordal_kernel_symmetric_and_nonnegative(x, y):
    if x == y:
        return
    for v in (ARCHIMEDEAN, Place.prime(2), Place.prime(3)):
        k = chordal_log(x, y, v)
        assert k >= -1e-15
        assert k == pytest.approx(chordal_log(y, x, v), abs=1e-14)


def test_jensen_closed_forms():
    assert jensen_integral(3, 4) == pytest.approx(math.log(5))
    assert jensen_integral(12, 18, Place.prime(3)) == pytest.approx(-math.log(3))
    with pytest.raises(InvalidInput):
        jensen_integral(0, 0)


@pytest.mark.parametrize("x, y", [(1, 0), (0, 1), (1, 1), (3, -4), (Fraction(1, 7), 5), (10**4, 1), (1, Fraction(999, 1000))])
def test_jensen_quadrature_matches_closed_form(x, y):
    val, err = arch_jensen_quadrature(x, y)
    assert val == pytest.approx(jensen_integral(x, y), abs=1e-8)
    assert err < 1e-8


def test_outer_log_modulus_integral():
    val, _ = outer_log_modulus_integral()
    assert val == pytest.approx(HALF_LOG2, abs=1e-12)


def test_standard_measure_energy():
    assert standard_measure_energy() == pytest.approx(LOG2, abs=1e-12)


@pytest.mark.parametrize(
    "f, expected",
    [
        (polynomial_map([0, 1]), 0.5),
        (polynomial_map([0, 0, 1]), math.pi / 4),
        # mpmath two-dimensional quadrature, 20-30 digits
        (chebyshev(2), 1.20333875588959604360468997298),
        (polynomial_map([-1, 0, 1]), 0.94054278653187705729),
        (normalize([1, 0, 1], [0, 2]), 1.1319717536774209643),
        (lattes(1, 2), 2.9439088352618840385),
    ],
    ids=["z", "z2", "T2", "z2-1", "joukowski", "lattes12"],
)
def test_pullback_integral_against_oracle(f, expected):
    val, err = arch_pullback_integral(f)
    assert val == pytest.approx(expected, abs=1e-9)
    assert err <= 1e-8


def test_refine_reports_both_values_when_stuck():
    calls = iter([1.0, 2.0, 3.0, 4.0, 5.0])
    with pytest.raises(QuadratureError) as info:
        refine(lambda nr, na: next(calls), SphereQuadrature(tol=1e-12, refinement_levels=2))
    assert info.value.values == (2.0, 3.0)
    calls = iter([1.0, 2.0, 3.0])
    val, err = refine(lambda nr, na: next(calls), SphereQuadrature(tol=1e-12, refinement_levels=2), strict=False)
    assert (val, err) == (3.0, 10.0)


def test_quadrature_validation():
    with pytest.raises(InvalidInput):
        SphereQuadrature(radial_nodes=4)
    with pytest.raises(InvalidInput):
        SphereQuadrature(tol=0)


def test_local_energies_for_half_z_squared():
    # R = 4 for z^2/2, so the 2-adic energy is -log|4|_2 = 2 log 2
    f = polynomial_map([0, 0, Fraction(1, 2)])
    e2, err = pullback_energy_local(f, Place.prime(2))
    assert e2 == pytest.approx(2 * LOG2) and err == 0.0
    e3, _ = pullback_energy_local(f, Place.prime(3))
    assert e3 == 0.0


@pytest.mark.parametrize("f", [chebyshev(2), polynomial_map([0, 0, Fraction(1, 2)]), lattes(2, 3), normalize([3, 1], [0, 0, 5])])
def test_breakdown_sums_to_shortcut(f):
    br = pullback_energy_global(f)
    assert br.total == pytest.approx(br.shortcut, abs=1e-9)
    assert br.per_place[0][0] == ARCHIMEDEAN


def test_arakelov_measure_norm():
    assert pullback_energy_global(polynomial_map([0, 1])).total == pytest.approx(0.5, abs=1e-12)


def test_pullback_points():
    f = polynomial_map([0, 0, 1])
    assert sorted(pullback_points(f, 4)) == [-2, 2]
    assert all(isinstance(p, Fraction) for p in pullback_points(f, 4))
    assert pullback_points(f, INFINITY) == [INFINITY, INFINITY]
    g = normalize([1, 0, 1], [0, 2])
    assert INFINITY in pullback_points(g, INFINITY) and 0 in pullback_points(g, INFINITY)
    roots = pullback_points(f, 2j)
    assert np.allclose(sorted(abs(np.array(roots))), [math.sqrt(2)] * 2)


def test_pushforward_and_pullback_masses():
    mu = WeightedPointMeasure(((Fraction(1, 2), 1.0), (3, -1.0)))
    f = chebyshev(2)
    assert pullback_measure(f, mu).mass == pytest.approx(0.0)
    assert len(pullback_measure(f, mu).atoms) == 4
    assert pushforward_measure(f, mu).atoms[0][0] == Fraction(-7, 4)


def test_discrete_energy_excludes_the_diagonal():
    mu = WeightedPointMeasure(((0, 1.0), (1, -1.0)))
    val, excluded = discrete_energy(mu, mu, return_excluded=True)
    assert excluded == 2
    # off-diagonal energy of a dipole is negative: -2 * (1/2) log 2
    assert val == pytest.approx(-LOG2)


def _random_dipoles(rng, k):
    pts = set()
    while len(pts) < k:
        pts.add(Fraction(rng.randint(-15, 15), rng.randint(1, 15)))
    w = np.array([rng.uniform(-1, 1) for _ in range(k)])
    w -= w.mean()
    return WeightedPointMeasure(tuple(zip(sorted(pts), map(float, w))))


@pytest.mark.parametrize("f", [polynomial_map([0, 0, 1]), chebyshev(2), normalize([1, 0, 1], [0, 2])], ids=["z2", "T2", "joukowski"])
def test_adjoint_identity(f):
    rng = random.Random(11)
    checked = 0
    while checked < 20:
        mu, nu = _random_dipoles(rng, 3), _random_dipoles(rng, 3)
        a, ea = discrete_energy(pullback_measure(f, mu), nu, True)
        b, eb = discrete_energy(mu, pushforward_measure(f, nu), True)
        if ea or eb:
            continue
        assert a == pytest.approx(b, abs=1e-9)
        checked += 1
