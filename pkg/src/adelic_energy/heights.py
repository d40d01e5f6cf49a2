"""Naive, Arakelov and canonical heights of rational points and Galois orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .errors import HeightOverflow, InvalidInput, OrbitAtInfinity
from .exact import as_rational
from .maps import INFINITY, RationalMap, projective_orbit
from .polynomials import ComplexRootSet, IntegerPolynomial, complex_roots, image_polynomial, mahler_log

HALF_LOG2 = 0.5 * math.log(2.0)
DEFAULT_BIT_BUDGET = 1 << 22

# Real root of x^3 - 3x^2 - x - 1, solved once at import.
THETA = brentq(lambda x: x**3 - 3 * x**2 - x - 1, 3.0, 4.0, xtol=1e-15)
LOG_THETA = math.log(THETA)


@dataclass(frozen=True)
class HeightValue:
    value: float
    error_estimate: float = 0.0
    method: str = "exact"
    flags: tuple[str, ...] = ()


@dataclass
class AlgebraicOrbit:
    """Galois-stable multiset given by a primitive polynomial; roots cached once."""

    defining_poly: IntegerPolynomial
    _roots: ComplexRootSet | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.defining_poly.degree < 1:
            raise InvalidInput("orbit polynomial must have degree >= 1")
        self.defining_poly = self.defining_poly.primitive()

    @classmethod
    def from_coeffs(cls, coeffs) -> "AlgebraicOrbit":
        return cls(IntegerPolynomial(coeffs))

    @classmethod
    def rational(cls, x) -> "AlgebraicOrbit":
        x = as_rational(x)
        return cls(IntegerPolynomial([-x.numerator, x.denominator]))

    @property
    def N(self) -> int:
        return self.defining_poly.degree

    @property
    def roots(self) -> ComplexRootSet:
        if self._roots is None:
            self._roots = complex_roots(self.defining_poly)
        return self._roots

    def squared(self) -> "AlgebraicOrbit":
        """Same points with every multiplicity doubled."""
        f = self.defining_poly
        r = None if self._roots is None else ComplexRootSet(np.repeat(self._roots.roots, 2), self._roots.residual_bound)
        return AlgebraicOrbit(f * f, r)


def _as_point(x):
    if x is INFINITY or isinstance(x, AlgebraicOrbit):
        return x
    return as_rational(x)


def naive_height(x) -> HeightValue:
    x = _as_point(x)
    if x is INFINITY:
        return HeightValue(0.0)
    if isinstance(x, Fraction):
        if x == 0:
            return HeightValue(0.0)
        return HeightValue(math.log(max(abs(x.numerator), x.denominator)))
    if x.N == 1:
        a0, a1 = x.defining_poly.coeffs
        return HeightValue(math.log(max(abs(a0), abs(a1))))
    return HeightValue(mahler_log(x.defining_poly, x.roots) / x.N, x.roots.residual_bound, "root-based")


def _log_hypot_int(p: int, q: int) -> float:
    return 0.5 * math.log(p * p + q * q)


def arakelov_height(x) -> HeightValue:
    x = _as_point(x)
    if x is INFINITY:
        return HeightValue(0.0)
    if isinstance(x, Fraction):
        return HeightValue(_log_hypot_int(x.numerator, x.denominator))
    if x.N == 1:
        a0, a1 = x.defining_poly.coeffs
        return HeightValue(_log_hypot_int(a0, a1))
    r = x.roots.roots
    total = math.log(x.defining_poly.lead) + float(np.sum(0.5 * np.log1p(np.abs(r) ** 2)))
    return HeightValue(total / x.N, x.roots.residual_bound, "root-based")


def arakelov_height_map(f: RationalMap) -> HeightValue:
    s = sum(a * a for a in f.P.coeffs) + sum(b * b for b in f.Q.coeffs)
    return HeightValue(0.5 * math.log(s))


def standard_potential(x) -> float:
    """Mean of -log+|a| + log sqrt(1 + |a|^2) over the orbit, plus log sqrt 2."""
    x = _as_point(x)
    if x is INFINITY:
        return HALF_LOG2
    if isinstance(x, Fraction):
        p, q = abs(x.numerator), x.denominator
        return -math.log(max(p, q)) + _log_hypot_int(p, q) + HALF_LOG2
    r = np.abs(x.roots.roots)
    vals = -np.log(np.maximum(r, 1.0)) + 0.5 * np.log1p(r**2)
    return float(np.mean(vals)) + HALF_LOG2


@dataclass(frozen=True)
class InequalityReport:
    h: float
    h_ar: float
    slacks: dict[str, float]

    @property
    def holds(self) -> bool:
        return all(s >= -1e-12 for s in self.slacks.values())


def check_height_inequalities(x) -> InequalityReport:
    """Slacks (>= 0 when satisfied) of the comparisons between h and h_Ar."""
    h = naive_height(x).value
    h_ar = arakelov_height(x).value
    excess = h_ar - HALF_LOG2
    slacks = {
        "h_ar_minus_half_log2_le_h": h - excess,
        "h_le_h_ar": h_ar - h,
    }
    is_zero = isinstance(_as_point(x), Fraction) and _as_point(x) == 0
    if not (is_zero or _as_point(x) is INFINITY):
        slacks["h_ar_ge_half_log2"] = excess
        slacks["sqrt_refinement"] = 2 * h_ar - math.log(2) + math.sqrt(LOG_THETA * max(excess, 0.0)) - h
    return InequalityReport(h, h_ar, slacks)


# ---------------------------------------------------------------------------
# canonical heights


def _projective_step(g: RationalMap, X: int, Y: int) -> tuple[int, int]:
    d = g.d
    xs = [X**i for i in range(d + 1)]
    ys = [Y**i for i in range(d + 1)]
    A = sum(a * xs[i] * ys[d - i] for i, a in enumerate(g.num_coeffs()))
    B = sum(b * xs[i] * ys[d - i] for i, b in enumerate(g.den_coeffs()))
    c = math.gcd(A, B)
    if B < 0 or (B == 0 and A < 0):
        c = -c
    return A // c, B // c


def _image_roots(g: RationalMap, roots: np.ndarray, infinite: int, new_degree: int) -> tuple[np.ndarray, int]:
    """Numerical images of the finite roots; returns finite images and count sent to infinity."""
    A, B, _, _, _ = projective_orbit(g, roots.astype(complex), np.ones(len(roots), dtype=complex))
    n_inf_new = len(roots) - new_degree
    order = np.argsort(np.abs(B))
    to_inf = np.zeros(len(roots), dtype=bool)
    if n_inf_new > 0:
        to_inf[order[:n_inf_new]] = True
    finite = A[~to_inf] / B[~to_inf]
    return finite, int(n_inf_new)


def _g_at_infinity(g: RationalMap):
    if g.Q.degree < g.d:
        return INFINITY
    return Fraction(g.P.coeffs[g.d] if g.P.degree == g.d else 0, g.Q.lead)


def _converged(est: list[float], threshold: float) -> bool:
    # Two consecutive small steps, so a coincidental early repeat does not stop the telescope.
    return len(est) >= 3 and abs(est[-1] - est[-2]) < threshold and abs(est[-2] - est[-3]) < threshold


def canonical_height(
    g: RationalMap,
    x,
    m_max: int = 8,
    tol: float = 1e-9,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> HeightValue:
    """Telescoped limit d^-m h(g^m x), stopping on the geometric-tail rule."""
    x = _as_point(x)
    d = g.d
    ratio = 1.0 - 1.0 / d
    if x is INFINITY or isinstance(x, Fraction) or x.N == 1:
        if isinstance(x, AlgebraicOrbit):
            a0, a1 = x.defining_poly.coeffs
            x = Fraction(-a0, a1)
        X, Y = (1, 0) if x is INFINITY else (x.numerator, x.denominator)
        est = [math.log(max(abs(X), abs(Y)))]
        for m in range(1, m_max + 1):
            X, Y = _projective_step(g, X, Y)
            if max(abs(X), abs(Y)).bit_length() > bit_budget:
                raise HeightOverflow(f"coefficients exceed {bit_budget} bits at step {m}; lower m_max")
            est.append(math.log(max(abs(X), abs(Y))) / d**m)
            if _converged(est, tol * ratio):
                return HeightValue(est[-1], abs(est[-1] - est[-2]) / ratio, "telescoped")
        diff = abs(est[-1] - est[-2])
        return HeightValue(est[-1], diff / ratio, "telescoped", ("not-converged",))
    return _canonical_height_orbit(g, x, m_max, tol, bit_budget)


def _canonical_height_orbit(g, x: AlgebraicOrbit, m_max, tol, bit_budget) -> HeightValue:
    d = g.d
    ratio = 1.0 - 1.0 / d
    N = x.N
    F = x.defining_poly
    roots = x.roots.roots.astype(complex)
    n_inf = 0  # multiplicity of infinity inside the orbit
    g_inf = _g_at_infinity(g)
    est = [mahler_log(F, ComplexRootSet(roots, 0.0)) / N]
    for m in range(1, m_max + 1):
        try:
            G = image_polynomial(F, g.P, g.Q)
        except OrbitAtInfinity:
            G = None
        if G is not None and G.max_abs_coeff().bit_length() > bit_budget:
            raise HeightOverflow(f"image polynomial exceeds {bit_budget} bits at step {m}; lower m_max")
        new_deg = 0 if G is None else G.degree
        finite, sent = _image_roots(g, roots, n_inf, new_deg)
        # points already at infinity go to g(inf)
        if g_inf is INFINITY:
            n_inf = n_inf + sent
        else:
            n_inf_prev = n_inf
            n_inf = sent
            if n_inf_prev:
                finite = np.concatenate([finite, np.full(n_inf_prev, complex(g_inf))])
                G = (G if G is not None else IntegerPolynomial([1])) * (
                    IntegerPolynomial([-g_inf.numerator, g_inf.denominator]) ** n_inf_prev
                )
        if G is None or G.degree < 1:
            h = 0.0
        else:
            G = G.primitive()
            h = (math.log(G.lead) + float(np.sum(np.log(np.maximum(np.abs(finite), 1.0))))) / N
        F, roots = G, finite
        est.append(h / d**m)
        if _converged(est, tol * ratio):
            return HeightValue(est[-1], abs(est[-1] - est[-2]) / ratio, "telescoped")
        if F is None or F.degree < 1:
            # everything sits at infinity, which is fixed: height stays 0
            return HeightValue(0.0, 0.0, "telescoped")
    diff = abs(est[-1] - est[-2])
    return HeightValue(est[-1], diff / ratio, "telescoped", ("not-converged",))
