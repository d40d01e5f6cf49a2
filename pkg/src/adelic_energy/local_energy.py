"""Chordal kernels, sphere quadrature and per-place pull-back energies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import AdelicError, InvalidInput, QuadratureError
from .exact import ARCHIMEDEAN, Place, as_rational, log_abs, valuation
from .maps import INFINITY, RationalMap, evaluate, projective, projective_orbit, reduction_datum
from .polynomials import IntegerPolynomial, complex_roots

HALF_LOG2 = 0.5 * math.log(2.0)
SAFETY = 10.0


@dataclass(frozen=True)
class SphereQuadrature:
    """Gauss-Legendre in u = r^2/(1+r^2) times a trapezoid rule in the angle."""

    radial_nodes: int = 64
    angular_nodes: int = 256
    tol: float = 1e-9
    refinement_levels: int = 3

    def __post_init__(self):
        if self.radial_nodes < 8 or self.angular_nodes < 8:
            raise InvalidInput("node counts must be >= 8")
        if self.tol <= 0:
            raise InvalidInput("tol must be positive")


@dataclass(frozen=True)
class EnergyInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidInput(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class EnergyBreakdown:
    per_place: tuple[tuple[Place, float, float], ...]
    total: float
    total_error: float
    shortcut: float


@dataclass(frozen=True)
class WeightedPointMeasure:
    atoms: tuple[tuple[object, float], ...]
    place: Place = ARCHIMEDEAN

    @property
    def mass(self) -> float:
        return sum(w for _, w in self.atoms)


# ---------------------------------------------------------------------------
# kernels


def _same_point(x, y) -> bool:
    (x1, x2), (y1, y2) = projective(x), projective(y)
    return x1 * y2 - x2 * y1 == 0


def chordal_log(x, y, v: Place = ARCHIMEDEAN) -> float:
    """-log of the chordal distance; +inf for coincident points."""
    (x1, x2), (y1, y2) = projective(x), projective(y)
    det = x1 * y2 - x2 * y1
    if det == 0:
        return math.inf
    if v.is_archimedean:
        if all(isinstance(c, int) for c in (x1, x2, y1, y2)):
            return 0.5 * (math.log(x1 * x1 + x2 * x2) + math.log(y1 * y1 + y2 * y2)) - math.log(abs(det))
        nx = math.hypot(abs(x1), abs(x2))
        ny = math.hypot(abs(y1), abs(y2))
        return -math.log(abs(det) / (nx * ny))
    if not all(isinstance(c, int) for c in (x1, x2, y1, y2)):
        raise InvalidInput("non-Archimedean kernel needs rational points")
    # coprime coordinates have max(|x1|_p, |x2|_p) = 1
    return valuation(det, v.p) * math.log(v.p)


def jensen_integral(x, y, v: Place = ARCHIMEDEAN) -> float:
    """Closed form of the integral of log|x - z y| against the Arakelov measure."""
    x, y = as_rational(x), as_rational(y)
    if x == 0 and y == 0:
        raise InvalidInput("(x, y) must not both vanish")
    if v.is_archimedean:
        num = x.numerator**2 * y.denominator**2 + y.numerator**2 * x.denominator**2
        return 0.5 * math.log(num) - math.log(x.denominator * y.denominator)
    vals = [log_abs(c, v) for c in (x, y) if c != 0]
    return max(vals)


# ---------------------------------------------------------------------------
# quadrature engine


def _gauss_panels(breaks: Sequence[float], n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def graded_breaks(levels: int = 14, ratio: float = 0.15) -> list[float]:
    """Panel ends in u geometrically refined toward the disk centre."""
    return [0.0] + [0.5 * ratio**k for k in range(levels, 0, -1)] + [0.5]


def _kink_breaks(u0: float) -> list[float]:
    """Panel ends at u0 and geometrically outward, for a log kink at small u0."""
    out = [0.0, u0]
    u = 4 * u0
    while u < 0.5:
        out.append(u)
        u *= 4
    return out + [0.5]


def _r_to_u(r: float) -> float:
    return r * r / (1.0 + r * r)


def disk_integral(
    func: Callable[[np.ndarray], np.ndarray],
    radial: int,
    angular: int,
    breaks: Sequence[float] = (0.0, 0.5),
) -> float:
    """Integral of func over |z| <= 1 against the Arakelov measure (mass 1/2)."""
    u, wu = _gauss_panels(sorted(set(breaks)), radial)
    r = np.sqrt(u / (1.0 - u))
    theta = 2.0 * np.pi * (np.arange(angular) + 0.5) / angular
    z = r[:, None] * np.exp(1j * theta)[None, :]
    vals = func(z)
    return float(np.sum(wu * vals.mean(axis=1)))


def refine(
    compute: Callable[[int, int], float],
    quad: SphereQuadrature,
    radial_growth: int = 2,
    angular_growth: int = 2,
    strict: bool = True,
) -> tuple[float, float]:
    """Grow node counts until the scaled refinement difference meets tol.

    With strict=False a miss returns the finest value and its (larger) error.
    """
    prev = compute(quad.radial_nodes, quad.angular_nodes)
    for k in range(1, quad.refinement_levels + 1):
        cur = compute(quad.radial_nodes * radial_growth**k, quad.angular_nodes * angular_growth**k)
        err = SAFETY * abs(cur - prev)
        if err <= quad.tol * max(1.0, abs(cur)):
            return cur, err
        prev_prev, prev = prev, cur
    if not strict:
        return prev, err
    raise QuadratureError(f"refinement did not reach tol {quad.tol}", (prev_prev, prev))


def _log_norm(f: RationalMap, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    A, B, L, _, _ = projective_orbit(f, X, Y)
    return L + 0.5 * np.log(np.abs(A) ** 2 + np.abs(B) ** 2)


def arch_pullback_integral(
    f: RationalMap, quad: SphereQuadrature | None = None, strict: bool = True
) -> tuple[float, float]:
    """Integral of log sqrt(|P|^2 + |Q|^2) against the Arakelov measure, with error."""
    quad = quad or SphereQuadrature()

    def compute(nr: int, na: int) -> float:
        inner = disk_integral(lambda z: _log_norm(f, z, np.ones_like(z)), nr, na)
        outer = disk_integral(lambda w: _log_norm(f, np.ones_like(w), w), nr, na)
        return inner + outer + f.d * HALF_LOG2

    return refine(compute, quad, strict=strict)


def outer_log_modulus_integral(quad: SphereQuadrature | None = None) -> tuple[float, float]:
    """Integral of log|z| over |z| > 1, computed as -log|w| over the unit disk."""
    quad = quad or SphereQuadrature()
    breaks = graded_breaks()

    def compute(nr: int, na: int) -> float:
        return disk_integral(lambda w: -np.log(np.abs(w)), nr // 4, na // 16, breaks)

    return refine(compute, quad)


def arch_jensen_quadrature(x, y, quad: SphereQuadrature | None = None) -> tuple[float, float]:
    """Quadrature of log|x - z y| against the Arakelov measure.

    Splits panels at the radius of the zero so the kink in the angular
    average is a panel end, and uses a fine angular grid near it.
    """
    quad = quad or SphereQuadrature(radial_nodes=12, angular_nodes=4096, refinement_levels=3)
    xc, yc = complex(as_rational(x)), complex(as_rational(y))
    inner_breaks = [0.0, 0.5]
    outer_breaks = [0.0, 0.5]
    if yc != 0 and abs(xc / yc) < 1:
        inner_breaks = graded_breaks() if xc == 0 else _kink_breaks(_r_to_u(abs(xc / yc)))
    if xc != 0 and abs(yc / xc) < 1:
        outer_breaks = graded_breaks() if yc == 0 else _kink_breaks(_r_to_u(abs(yc / xc)))

    def compute(nr: int, na: int) -> float:
        inner = disk_integral(lambda z: np.log(np.abs(xc - z * yc)), nr, na, inner_breaks)
        outer = disk_integral(lambda w: np.log(np.abs(xc * w - yc)), nr, na, outer_breaks)
        return inner + outer + HALF_LOG2

    # radial nodes crowding the kink hurt the angular rule, so refine in angle only
    return refine(compute, quad, radial_growth=1, angular_growth=4)


def standard_measure_energy(outer: int = 64, order: int = 24, levels: int = 24, ratio: float = 0.2) -> float:
    """Double integral of -log(|e^it - e^is| / 2) over the torus.

    Trapezoid in t; in s = t + v, Gauss-Legendre panels graded toward the
    diagonal v = 0 and v = 2 pi where the kernel has its log singularity.
    """
    half = [0.0] + [math.pi * ratio**k for k in range(levels, 0, -1)] + [math.pi]
    v_left, w_left = _gauss_panels(half, order)
    wv = np.concatenate([w_left, w_left]) / (2 * math.pi)
    # distance from s = t + v to the diagonal, kept exact near both ends
    gap = np.concatenate([v_left, v_left])
    t = 2 * math.pi * np.arange(outer) / outer
    # |e^it - e^is| / 2 = |sin((s - t)/2)|
    vals = np.broadcast_to(-np.log(np.sin(gap / 2.0)), (len(t), len(gap)))
    return float(np.mean(vals @ wv))


# ---------------------------------------------------------------------------
# pull-back energies


def pullback_energy_local(f: RationalMap, v: Place, quad: SphereQuadrature | None = None, *, _I=None, _R=None):
    """Energy of the pull-back of the Arakelov measure at one place, with error."""
    d = f.d
    R = _R if _R is not None else reduction_datum(f).R
    if not v.is_archimedean:
        coeffs = [c for c in f.P.coeffs + f.Q.coeffs if c]
        log_f = -min(valuation(c, v.p) for c in coeffs) * math.log(v.p)
        return -log_abs(R, v) + 2 * d * log_f, 0.0
    I, err = _I if _I is not None else arch_pullback_integral(f, quad)
    return -log_abs(R, v) - d / 2 + 2 * d * I, 2 * d * err


def pullback_energy_global(
    f: RationalMap, quad: SphereQuadrature | None = None, breakdown: bool = True, strict: bool = True
) -> EnergyBreakdown:
    """Sum over places; checks the per-place sum against the shortcut 2dI - d/2."""
    d = f.d
    I, err = arch_pullback_integral(f, quad, strict)
    shortcut = 2 * d * I - d / 2
    if not breakdown:
        return EnergyBreakdown((), shortcut, 2 * d * err, shortcut)
    datum = reduction_datum(f, with_primes=True)
    rows = [(ARCHIMEDEAN, *pullback_energy_local(f, ARCHIMEDEAN, quad, _I=(I, err), _R=datum.R))]
    for p in datum.bad_primes.primes:
        place = Place.prime(p)
        rows.append((place, *pullback_energy_local(f, place, _R=datum.R)))
    total = math.fsum(r[1] for r in rows)
    total_err = sum(r[2] for r in rows)
    if abs(total - shortcut) > total_err + 1e-9 * max(1.0, abs(total)):
        raise AdelicError(f"breakdown {total} disagrees with shortcut {shortcut}")
    return EnergyBreakdown(tuple(rows), total, total_err, shortcut)


# ---------------------------------------------------------------------------
# discrete measures


def discrete_energy(mu: WeightedPointMeasure, nu: WeightedPointMeasure, return_excluded: bool = False):
    """Off-diagonal pairing sum_{x != y} w(x) w(y) (-log ||x, y||)."""
    if mu.place != nu.place:
        raise InvalidInput("measures live at different places")
    terms = []
    excluded = 0
    for x, wx in mu.atoms:
        for y, wy in nu.atoms:
            k = chordal_log(x, y, mu.place)
            if math.isinf(k):
                excluded += 1
                continue
            terms.append(wx * wy * k)
    value = math.fsum(terms)
    return (value, excluded) if return_excluded else value


def pullback_points(f: RationalMap, w, tol: float = 1e-10) -> list:
    """The d preimages of w with multiplicity; infinity appears degree-drop times."""
    d = f.d
    if w is INFINITY:
        poly_c = list(f.Q.coeffs)
    elif isinstance(w, (complex, float, np.complexfloating, np.floating)):
        n = np.array(f.num_coeffs(), dtype=complex)
        m = np.array(f.den_coeffs(), dtype=complex)
        c = n - complex(w) * m
        while len(c) and c[-1] == 0:
            c = c[:-1]
        roots = list(np.roots(c[::-1])) if len(c) > 1 else []
        return roots + [INFINITY] * (d - len(roots))
    else:
        q = as_rational(w)
        poly_c = [q.denominator * a - q.numerator * b for a, b in zip(f.num_coeffs(), f.den_coeffs())]
    poly = IntegerPolynomial(poly_c)
    if poly.degree < 1:
        return [INFINITY] * d
    roots = list(complex_roots(poly, tol).roots)
    out = []
    for r in roots:
        # keep exactly rational preimages exact
        rr = Fraction(round(r.real)) if abs(r.imag) < 1e-12 and abs(r.real - round(r.real)) < 1e-12 else None
        out.append(rr if rr is not None and poly(rr) == 0 else complex(r))
    return out + [INFINITY] * (d - poly.degree)


def pullback_measure(f: RationalMap, mu: WeightedPointMeasure) -> WeightedPointMeasure:
    atoms = []
    for x, w in mu.atoms:
        atoms += [(y, w) for y in pullback_points(f, x)]
    return WeightedPointMeasure(tuple(atoms), mu.place)


def pushforward_measure(f: RationalMap, mu: WeightedPointMeasure) -> WeightedPointMeasure:
    return WeightedPointMeasure(tuple((evaluate(f, x), w) for x, w in mu.atoms), mu.place)
