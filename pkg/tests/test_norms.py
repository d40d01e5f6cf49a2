import math
from fractions import Fraction

import numpy as np
import pytest

from adelic_energy.errors import EmptyEnclosure, UnsupportedMap
from adelic_energy.local_energy import EnergyInterval
from adelic_energy.maps import chebyshev, conjugate_power_map, lattes, normalize, polynomial_map
from adelic_energy.norms import (
    EnclosureLevel,
    az_pairing,
    chebyshev_norm_value,
    closed_form_conjugated_power,
    default_depth,
    default_period,
    enclosure_levels,
    finite_place_term,
    intersect_levels,
    norm_enclosure,
    norm_monte_carlo,
    norm_report,
    norm_small_points,
    periodic_orbit,
    verify_explicit_bounds,
)

LOG2 = math.log(2)
Z2 = polynomial_map([0, 0, 1])


def test_closed_forms():
    assert chebyshev_norm_value() == pytest.approx(0.9624236501192069, abs=1e-15)
    assert closed_form_conjugated_power(1, 0) == pytest.approx(LOG2)
    # squaring conjugated by 2z: 2-adic part 2 log 2 plus log(5/2) from the real place
    assert closed_form_conjugated_power(2, 0) == pytest.approx(math.log(5))
    assert closed_form_conjugated_power(Fraction(1, 2), 0) == pytest.approx(math.log(5))
    assert closed_form_conjugated_power(1, 1) == pytest.approx(chebyshev_norm_value())


def test_default_depth_and_period():
    assert default_depth(2) == 3 and default_depth(3) == 3 and default_depth(8) == 2 and default_depth(9) == 1
    assert default_period(2) == 8 and default_period(3) == 5 and default_period(4) == 4


def test_first_level_for_squaring():
    # I = pi/4, energy of the pull-back (2 d I - d/2) / d^2 = (pi - 1)/4
    (lvl,) = enclosure_levels(Z2, depth=1)
    E = (math.pi - 1) / 4
    assert lvl.energy == pytest.approx(E, abs=1e-12)
    assert lvl.interval.lo == pytest.approx((2 * E + 0.5) / (math.sqrt(2) + 1) ** 2, abs=1e-10)
    assert lvl.interval.hi == pytest.approx(0.5 + 2 / (math.sqrt(2) - 1) ** 2 * (E - 0.5), abs=1e-10)


def test_intersection_floor_and_empty_enclosure():
    lv = [EnclosureLevel(1, 0.0, 0.0, EnergyInterval(0.2, 0.9)), EnclosureLevel(2, 0.0, 0.0, EnergyInterval(0.3, 0.8))]
    assert intersect_levels(lv) == EnergyInterval(0.5, 0.8)
    bad = [EnclosureLevel(1, 0.0, 0.0, EnergyInterval(0.6, 0.7)), EnclosureLevel(2, 0.0, 0.0, EnergyInterval(0.8, 0.9))]
    with pytest.raises(EmptyEnclosure, match="inconsistent-enclosure"):
        intersect_levels(bad)


@pytest.mark.parametrize(
    "f, value",
    [(Z2, LOG2), (chebyshev(2), chebyshev_norm_value()), (conjugate_power_map(2, 2, 3), closed_form_conjugated_power(2, 3))],
    ids=["z2", "T2", "conj23"],
)
def test_enclosures_contain_closed_forms(f, value):
    assert norm_enclosure(f, depth=2).contains(value)


def test_monte_carlo_squaring_and_thread_independence():
    # every sample sits on the unit circle up to eigenvalue rounding
    v, se = norm_monte_carlo(Z2, samples=2000)
    assert v == pytest.approx(LOG2, abs=1e-6) and se < 1e-6
    T2 = chebyshev(2)
    assert norm_monte_carlo(T2, samples=5000, seed=5) == norm_monte_carlo(T2, samples=5000, seed=5, threads=3)
    assert norm_monte_carlo(T2, samples=5000, seed=5) != norm_monte_carlo(T2, samples=5000, seed=6)


def test_monte_carlo_finite_places():
    f = polynomial_map([Fraction(1, 2), 0, 1])
    assert finite_place_term(f) == pytest.approx(LOG2)
    with pytest.raises(UnsupportedMap):
        norm_monte_carlo(polynomial_map([0, 0, 2]))
    with pytest.raises(UnsupportedMap):
        norm_monte_carlo(normalize([1, 0, 1], [0, 2]))


def test_periodic_orbit_of_squaring():
    # points with z^8 = z: zero and the seventh roots of unity
    orbit = periodic_orbit(Z2, 3)
    assert orbit.defining_poly.coeffs == (0, -1, 0, 0, 0, 0, 0, 0, 1)
    want = np.concatenate([[0], np.exp(2j * np.pi * np.arange(7) / 7)])
    dist = np.abs(orbit.roots.roots[:, None] - want[None, :])
    assert np.all(dist.min(axis=0) < 1e-12) and np.all(dist.min(axis=1) < 1e-12)


def test_small_points_of_squaring():
    # zero plus 255 roots of unity: 2 h_Ar = (255/256) log 2
    assert norm_small_points(Z2, 8).value == pytest.approx(255 / 256 * LOG2, abs=1e-12)


def test_small_points_of_chebyshev():
    sp = norm_small_points(chebyshev(2), 6)
    assert sp.value == pytest.approx(chebyshev_norm_value(), abs=1e-9)
    assert [n for n, _ in sp.trend] == list(range(1, 7))


def test_norm_report_flags_and_fields():
    rep = norm_report(chebyshev(2), depth=2, samples=20_000, period_max=6)
    assert rep.consistency_flags == ()
    assert rep.enclosure.contains(rep.mc_estimate[0])
    assert len(rep.levels) == 2
    rep = norm_report(normalize([1, 0, 1], [0, 2]), depth=2, period_max=4)
    assert rep.mc_estimate is None and "polynomial" in rep.mc_skipped


def test_az_pairing_oracle():
    # arcsine measure on [-2, 2] against the unit circle: integral of log+|2 cos t| dt / pi
    rep = az_pairing(chebyshev(2), Z2, n_max=8)
    assert rep.estimate == pytest.approx(0.3230659472194505, abs=1e-4)
    assert az_pairing(Z2, Z2, n_max=6).estimate == pytest.approx(0.0, abs=1e-12)


def test_explicit_bounds_and_lattes():
    assert verify_explicit_bounds(chebyshev(2)).holds
    rep = verify_explicit_bounds(lattes(1, 2))
    assert rep.holds and rep.lower_slack > 0
