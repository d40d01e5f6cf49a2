"""Estimators of the canonical-measure energy, closed forms and pairing checks."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateMap, EmptyEnclosure, InvalidInput, UnsupportedMap
from .exact import as_rational, prime_support, rational_valuation
from .heights import AlgebraicOrbit, arakelov_height, arakelov_height_map, canonical_height
from .local_energy import EnergyInterval, SphereQuadrature, pullback_energy_global
from .maps import DEFAULT_DEGREE_CAP, RationalMap, iterate, lattes, polynomial_map, projective_orbit
from .polynomials import ComplexRootSet, IntegerPolynomial, aberth_roots, complex_roots, poly_gcd

LOG2 = math.log(2.0)
SMALL_POINTS_DEGREE_CAP = 256
ENCLOSURE_QUAD = SphereQuadrature(radial_nodes=64, angular_nodes=256, tol=1e-6, refinement_levels=3)


def chebyshev_norm_value() -> float:
    return math.log((3.0 + math.sqrt(5.0)) / 2.0)


def closed_form_conjugated_power(a, b) -> float:
    """Energy of the canonical measure of the squaring map conjugated by z -> az + b."""
    a, b = as_rational(a), as_rational(b)
    if a == 0:
        raise InvalidInput("a must be nonzero")
    finite = 0.0
    support = set(prime_support(a)) | (set(prime_support(b)) if b != 0 else set())
    for p in sorted(support):
        vals = [0, -2 * rational_valuation(a, p)]
        if b != 0:
            vals.append(-2 * rational_valuation(b, p))
        finite += max(vals) * math.log(p)
    A2, B = float(a) ** 2, abs(float(b))
    eta = 1.0 + A2 + B * B + math.sqrt((A2 + (1 - B) ** 2) * (A2 + (1 + B) ** 2))
    return -LOG2 + finite + math.log(eta)


# ---------------------------------------------------------------------------
# enclosure


@dataclass(frozen=True)
class EnclosureLevel:
    n: int
    energy: float
    error: float
    interval: EnergyInterval


def default_depth(d: int, cap: int = DEFAULT_DEGREE_CAP) -> int:
    depth = 1
    while depth < 3 and d ** (depth + 1) <= cap:
        depth += 1
    return depth


def enclosure_levels(f: RationalMap, depth: int | None = None, quad: SphereQuadrature | None = None) -> list[EnclosureLevel]:
    """Per-iterate intervals from the pull-back bounds applied to f^n."""
    if f.d < 2:
        raise InvalidInput("enclosure needs degree >= 2")
    depth = depth or default_depth(f.d)
    quad = quad or ENCLOSURE_QUAD
    out = []
    for n in range(1, depth + 1):
        fn = iterate(f, n)
        D = fn.d
        # a missed tolerance only widens this level's interval
        br = pullback_energy_global(fn, quad, breakdown=False, strict=False)
        E, err = br.shortcut / D**2, br.total_error / D**2
        sq = math.sqrt(D)
        lo = (D * (E - err) + 0.5) / (sq + 1) ** 2
        hi = 0.5 + D / (sq - 1) ** 2 * (E + err - 0.5)
        out.append(EnclosureLevel(n, E, err, EnergyInterval(lo, hi)))
    return out


def intersect_levels(levels: list[EnclosureLevel]) -> EnergyInterval:
    # probability measures have energy at least 1/2
    lo = max([0.5] + [l.interval.lo for l in levels])
    hi = min(l.interval.hi for l in levels)
    if lo > hi:
        detail = ", ".join(f"n={l.n}: [{l.interval.lo:.9g}, {l.interval.hi:.9g}]" for l in levels)
        raise EmptyEnclosure(f"inconsistent-enclosure: {detail}")
    return EnergyInterval(lo, hi)


def norm_enclosure(f: RationalMap, depth: int | None = None, quad: SphereQuadrature | None = None) -> EnergyInterval:
    return intersect_levels(enclosure_levels(f, depth, quad))


# ---------------------------------------------------------------------------
# Monte Carlo


def _monic_coefficients(f: RationalMap) -> list[Fraction]:
    if not f.is_polynomial:
        raise UnsupportedMap("Monte Carlo needs a polynomial map; use norm_enclosure")
    c = f.Q.coeffs[0]
    coeffs = [Fraction(a, c) for a in f.P.coeffs]
    if coeffs[-1] != 1:
        raise UnsupportedMap("Monte Carlo needs a monic polynomial; use norm_enclosure")
    return coeffs


def finite_place_term(f: RationalMap) -> float:
    """(2/d) sum_p log max(1, |a_i|_p) for a monic polynomial."""
    coeffs = _monic_coefficients(f)
    den = math.lcm(*(c.denominator for c in coeffs))
    total = 0.0
    for p in prime_support(den) if den > 1 else ():
        worst = max(-rational_valuation(c, p) for c in coeffs if c != 0)
        total += max(0, worst) * math.log(p)
    return 2.0 / f.d * total


def _mc_chains(monic: np.ndarray, seeds: list[tuple[int, int]], steps: int, burn_in: int) -> np.ndarray:
    """Run independent inverse-iteration chains; returns per-chain sample means."""
    d = len(monic) - 1
    k = len(seeds)
    gens = [np.random.Generator(np.random.Philox(np.random.SeedSequence(list(s)))) for s in seeds]
    comp = np.zeros((k, d, d), dtype=complex)
    if d > 1:
        comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -monic[:-1]
    z = np.full(k, 1 + 1j)
    acc = np.zeros(k)
    for step in range(burn_in + steps):
        comp[:, 0, -1] = -(monic[0] - z)
        roots = np.linalg.eigvals(comp)
        pick = np.array([g.integers(d) for g in gens])
        z = roots[np.arange(k), pick]
        if step >= burn_in:
            acc += 0.5 * np.log1p(np.abs(z) ** 2)
    return acc / steps


def norm_monte_carlo(
    f: RationalMap,
    samples: int = 100_000,
    burn_in: int = 20,
    seed: int = 0,
    chains: int = 100,
    threads: int = 1,
) -> tuple[float, float]:
    """Inverse-iteration estimate for monic polynomials, with batch-means stderr."""
    coeffs = _monic_coefficients(f)
    monic = np.array([float(c) for c in coeffs])
    steps = max(1, samples // chains)
    seeds = [(seed, k) for k in range(chains)]
    blocks = [seeds[i::threads] for i in range(threads)] if threads > 1 else [seeds]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda s: _mc_chains(monic, s, steps, burn_in), blocks))
        means = np.empty(chains)
        for i, part in enumerate(parts):
            means[i::threads] = part
    else:
        means = _mc_chains(monic, seeds, steps, burn_in)
    value = 2.0 * float(np.mean(means)) + finite_place_term(f)
    stderr = 2.0 * float(np.std(means, ddof=1)) / math.sqrt(chains)
    return value, stderr


# ---------------------------------------------------------------------------
# small points


def _start_radius(F: IntegerPolynomial) -> float:
    """Geometric mean of the nonzero root moduli, read off the end coefficients."""
    low = next(i for i, c in enumerate(F.coeffs) if c)
    n = F.degree - low
    if n < 1:
        return 1.0
    return math.exp((math.log(abs(F.coeffs[low])) - math.log(abs(F.lead))) / n)


def periodic_orbit(f: RationalMap, n: int, degree_cap: int = SMALL_POINTS_DEGREE_CAP) -> AlgebraicOrbit:
    """Squarefree orbit of points of period dividing n (infinity excluded).

    Roots come from Aberth iteration on F(z) = P_n(z) - z Q_n(z) evaluated by
    iterating f numerically, which stays well conditioned for large n.
    """
    fn = iterate(f, n, degree_cap)
    z = IntegerPolynomial([0, 1])
    F = (fn.P - z * fn.Q).primitive()
    if F.degree < 1:
        raise DegenerateMap(f"period-{n} polynomial is degenerate")
    G = poly_gcd(F, F.derivative())
    if G.degree > 0:
        F = F.exact_quotient(G).primitive()
        return AlgebraicOrbit(F, complex_roots(F))

    def ratio(pts: np.ndarray) -> np.ndarray:
        ones = np.ones_like(pts)
        X, Y, _, dX, dY = projective_orbit(fn, pts, ones, ones, 0 * ones)
        # F and F' share the factor e^L, which cancels in the ratio
        return (X - pts * Y) / (dX - Y - pts * dY)

    if F.degree == 1:
        return AlgebraicOrbit(F)
    # clustered roots converge slowly but surely; the certified fallback is far slower
    roots = aberth_roots(ratio, F.degree, _start_radius(F), max_iter=5000)
    if roots is None:
        return AlgebraicOrbit(F, complex_roots(F))
    return AlgebraicOrbit(F, ComplexRootSet(np.sort_complex(roots), 0.0, "aberth-dynamic"))


@dataclass(frozen=True)
class SmallPointsResult:
    value: float
    trend: tuple[tuple[int, float], ...]


def norm_small_points(f: RationalMap, n_max: int = 8, degree_cap: int = SMALL_POINTS_DEGREE_CAP) -> SmallPointsResult:
    """2 h_Ar of period-n orbits, n = 1..n_max."""
    if f.d < 2:
        raise InvalidInput("small points need degree >= 2")
    trend = []
    for n in range(1, n_max + 1):
        orbit = periodic_orbit(f, n, degree_cap)
        trend.append((n, 2.0 * arakelov_height(orbit).value))
    return SmallPointsResult(trend[-1][1], tuple(trend))


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class NormReport:
    enclosure: EnergyInterval
    mc_estimate: tuple[float, float] | None
    small_points_estimate: SmallPointsResult | None
    depth_used: int
    consistency_flags: tuple[str, ...] = ()
    levels: tuple[EnclosureLevel, ...] = ()
    mc_skipped: str | None = None


def default_period(d: int, cap: int = SMALL_POINTS_DEGREE_CAP) -> int:
    n = 1
    while d ** (n + 1) <= cap and n < 8:
        n += 1
    return n


def norm_report(
    f: RationalMap,
    depth: int | None = None,
    quad: SphereQuadrature | None = None,
    samples: int = 100_000,
    burn_in: int = 20,
    seed: int = 0,
    period_max: int | None = None,
    threads: int = 1,
) -> NormReport:
    """All three estimators plus cross-checks between them."""
    depth = depth or default_depth(f.d)
    levels = enclosure_levels(f, depth, quad)
    enc = intersect_levels(levels)
    flags = []
    mc, skipped = None, None
    try:
        mc = norm_monte_carlo(f, samples, burn_in, seed, threads=threads)
    except UnsupportedMap as exc:
        skipped = str(exc)
    if mc is not None and not enc.contains(mc[0], 3 * mc[1]):
        flags.append("mc-outside-enclosure")
    sp = norm_small_points(f, period_max or default_period(f.d))
    if not enc.contains(sp.value):
        flags.append("small-points-outside-enclosure")
    return NormReport(enc, mc, sp, depth, tuple(flags), tuple(levels), skipped)


@dataclass(frozen=True)
class AZReport:
    estimate: float
    per_period: tuple[tuple[int, float], ...]
    envelope: EnergyInterval | None = None
    symmetric_check: float | None = None
    errors: tuple[tuple[int, float], ...] = ()


def _is_power_map(g: RationalMap) -> bool:
    return g.Q.coeffs == (1,) and g.P.coeffs == (0,) * g.d + (1,)


def _az_periods(f: RationalMap, g: RationalMap, n_max: int, m_max: int, tol: float):
    vals, errs = [], []
    for n in range(1, n_max + 1):
        orbit = periodic_orbit(f, n)
        h = canonical_height(g, orbit, m_max, tol)
        vals.append((n, h.value))
        errs.append((n, h.error_estimate))
    return vals, errs


def az_pairing(
    f: RationalMap,
    g: RationalMap,
    n_max: int = 8,
    m_max: int = 8,
    tol: float = 1e-3,
    symmetric: bool = False,
    quad: SphereQuadrature | None = None,
) -> AZReport:
    """Canonical g-height of the period-n orbits of f, which tends to the pairing."""
    if f.d < 2 or g.d < 2:
        raise InvalidInput("pairing needs degree >= 2 maps")
    vals, errs = _az_periods(f, g, n_max, m_max, tol)
    envelope = None
    if _is_power_map(g):
        enc = norm_enclosure(f, quad=quad)
        envelope = EnergyInterval(0.5 * (enc.lo - LOG2), 0.5 * enc.hi)
    sym = None
    if symmetric:
        sym = _az_periods(g, f, n_max, m_max, tol)[0][-1][1]
    return AZReport(vals[-1][1], tuple(vals), envelope, sym, tuple(errs))


@dataclass(frozen=True)
class BoundsReport:
    lower_bound: float
    upper_bound: float
    enclosure: EnergyInterval
    lower_slack: float
    upper_slack: float

    @property
    def holds(self) -> bool:
        return self.lower_slack >= 0 and self.upper_slack >= 0


def verify_explicit_bounds(
    f: RationalMap, quad: SphereQuadrature | None = None, depth: int | None = None, enclosure: EnergyInterval | None = None
) -> BoundsReport:
    """Compare the universal height bounds with the enclosure of (d/2) times the energy."""
    d = f.d
    h = arakelov_height_map(f).value
    sq = math.sqrt(d)
    lower = d / (sq + 1) ** 2 * h - 1.5 * d * LOG2
    upper = (2 * d + 1) / 4 * LOG2 + math.log(d + 1) + d / (sq - 1) ** 2 * h
    enc = enclosure or norm_enclosure(f, depth, quad)
    return BoundsReport(lower, upper, enc, d / 2 * enc.hi - lower, upper - d / 2 * enc.lo)


@dataclass(frozen=True)
class LattesReport:
    a: int
    b: int
    target: float
    enclosure: EnergyInterval
    small_points: float
    enclosure_clears: bool
    small_points_clears: bool


def lattes_lower_check(
    a: int, b: int, quad: SphereQuadrature | None = None, tol: float = 0.05, depth: int = 2, n_max: int = 4
) -> LattesReport:
    f = lattes(a, b)
    target = math.log(a * b)
    enc = norm_enclosure(f, depth, quad)
    sp = norm_small_points(f, n_max).value
    return LattesReport(a, b, target, enc, sp, enc.hi >= target - tol, sp >= target - tol)
