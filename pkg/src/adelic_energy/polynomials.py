"""Exact integer polynomials, resultants, numerical roots and image polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import flint
import numpy as np

from .errors import InvalidInput, OrbitAtInfinity

DEFAULT_ROOT_TOL = 1e-10
BAREISS_MAX_SIZE = 16


@dataclass(frozen=True)
class IntegerPolynomial:
    """Integer coefficients, lowest degree first, no trailing zeros."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_flint(cls, f: flint.fmpz_poly) -> "IntegerPolynomial":
        return cls(int(c) for c in f.coeffs())

    @classmethod
    def from_roots(cls, roots: Sequence[int]) -> "IntegerPolynomial":
        out = cls([1])
        for r in roots:
            out = out * cls([-r, 1])
        return out

    def to_flint(self) -> flint.fmpz_poly:
        return flint.fmpz_poly(list(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
            if g == 1:
                break
        return g

    def primitive(self) -> "IntegerPolynomial":
        """Primitive part with positive leading coefficient."""
        if self.is_zero():
            return self
        g = self.content()
        if self.lead < 0:
            g = -g
        return IntegerPolynomial(c // g for c in self.coeffs)

    def derivative(self) -> "IntegerPolynomial":
        return IntegerPolynomial(i * c for i, c in enumerate(self.coeffs) if i)

    def __add__(self, other: "IntegerPolynomial") -> "IntegerPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntegerPolynomial(x + y for x, y in zip(a, b))

    def __neg__(self) -> "IntegerPolynomial":
        return IntegerPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: "IntegerPolynomial") -> "IntegerPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "IntegerPolynomial":
        if isinstance(other, int):
            return IntegerPolynomial(c * other for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return IntegerPolynomial()
        return IntegerPolynomial.from_flint(self.to_flint() * other.to_flint())

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntegerPolynomial":
        return IntegerPolynomial.from_flint(self.to_flint() ** k)

    def __call__(self, x):
        """Exact Horner evaluation at an int or Fraction (floats also accepted)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def exact_quotient(self, other: "IntegerPolynomial") -> "IntegerPolynomial":
        q, r = divmod(self.to_flint(), other.to_flint())
        if not r.is_zero():
            raise InvalidInput("division is not exact")
        return IntegerPolynomial.from_flint(q)

    def homogeneous_value(self, x: int, y: int, degree: int) -> int:
        """sum c_i x^i y^(degree - i), exact."""
        return sum(c * x**i * y ** (degree - i) for i, c in enumerate(self.coeffs))

    def max_abs_coeff(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def __str__(self) -> str:
        return render_polynomial(self.coeffs)


def render_polynomial(coeffs: Sequence, var: str = "z") -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        mag = abs(c)
        sign = "-" if c < 0 else "+"
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def poly_gcd(f: IntegerPolynomial, g: IntegerPolynomial) -> IntegerPolynomial:
    return IntegerPolynomial.from_flint(f.to_flint().gcd(g.to_flint())).primitive()


def squarefree_part(f: IntegerPolynomial) -> IntegerPolynomial:
    """Primitive squarefree part (product of distinct irreducible factors)."""
    g = poly_gcd(f, f.derivative())
    if g.degree <= 0:
        return f.primitive()
    return f.exact_quotient(g).primitive()


def compose(f: IntegerPolynomial, g: IntegerPolynomial) -> IntegerPolynomial:
    """f(g(z)) exactly."""
    if f.degree <= 0:
        return f
    return IntegerPolynomial.from_flint(f.to_flint()(g.to_flint()))


def _bareiss_det(m: list[list[int]]) -> int:
    n = len(m)
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def sylvester_matrix(f: IntegerPolynomial, g: IntegerPolynomial) -> list[list[int]]:
    m, n = f.degree, g.degree
    size = m + n
    rows = []
    fc, gc = list(reversed(f.coeffs)), list(reversed(g.coeffs))
    for i in range(n):
        rows.append([0] * i + fc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gc + [0] * (size - n - 1 - i))
    return rows


def resultant(f: IntegerPolynomial, g: IntegerPolynomial) -> int:
    """Res(f, g) at the true degrees; Res(f, c) = c^deg f."""
    if f.is_zero() or g.is_zero():
        raise InvalidInput("resultant of the zero polynomial")
    if f.degree == 0 and g.degree == 0:
        return 1
    if g.degree == 0:
        return g.lead**f.degree
    if f.degree == 0:
        return f.lead**g.degree
    if f.degree + g.degree <= BAREISS_MAX_SIZE:
        return _bareiss_det(sylvester_matrix(f, g))
    return int(f.to_flint().resultant(g.to_flint()))


# ---------------------------------------------------------------------------
# Numerical roots


@dataclass(frozen=True)
class ComplexRootSet:
    roots: np.ndarray
    residual_bound: float
    method: str = "companion"

    def __len__(self) -> int:
        return len(self.roots)


def _scaled_float_coeffs(f: IntegerPolynomial) -> np.ndarray:
    """Coefficients divided by the max magnitude, highest degree first."""
    scale = f.max_abs_coeff()
    return np.array([c / scale for c in reversed(f.coeffs)], dtype=float)


def _horner_with_derivative(coeffs_high_first: np.ndarray, z: np.ndarray):
    p = np.zeros_like(z) + coeffs_high_first[0]
    dp = np.zeros_like(z)
    # far-out iterates may overflow; callers treat inf as a failed check
    with np.errstate(over="ignore", invalid="ignore"):
        for c in coeffs_high_first[1:]:
            dp = dp * z + p
            p = p * z + c
    return p, dp


def _newton_steps_arb(f: IntegerPolynomial, roots: np.ndarray, prec: int) -> np.ndarray:
    """Newton corrections F/F' evaluated in multiprecision ball arithmetic."""
    old = flint.ctx.prec
    flint.ctx.prec = prec
    try:
        fa = flint.acb_poly([flint.acb(c) for c in f.coeffs])
        dfa = fa.derivative()
        out = np.empty(len(roots), dtype=complex)
        for i, r in enumerate(roots):
            x = flint.acb(complex(r).real, complex(r).imag)
            fv, dv = fa(x), dfa(x)
            if dv == 0:
                out[i] = np.inf
                continue
            q = fv / dv
            out[i] = complex(float(q.real.mid()), float(q.imag.mid()))
        return out
    finally:
        flint.ctx.prec = old


def _relative_residual(f: IntegerPolynomial, roots: np.ndarray) -> float:
    c = _scaled_float_coeffs(f)
    r = np.asarray(roots, dtype=complex)
    val, _ = _horner_with_derivative(c.astype(complex), r)
    absr = np.abs(r)
    scale, _ = _horner_with_derivative(np.abs(c), absr)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0, np.abs(val) / scale, 0.0)
    return float(np.max(rel)) if len(rel) else 0.0


def certified_roots(f: IntegerPolynomial) -> ComplexRootSet:
    """Multiprecision isolating roots with multiplicity via python-flint."""
    out = []
    for r, mult in f.to_flint().complex_roots():
        z = complex(float(r.real.mid()), float(r.imag.mid()))
        out += [z] * int(mult)
    roots = np.array(out, dtype=complex)
    return ComplexRootSet(roots, _relative_residual(f, roots), "certified")


def complex_roots(f: IntegerPolynomial, tol: float = DEFAULT_ROOT_TOL) -> ComplexRootSet:
    """All complex roots with multiplicity.

    Companion eigenvalues plus Newton polish in double precision; accepted when
    a multiprecision Newton step confirms every root to ``tol`` (relative).
    Otherwise falls back to certified multiprecision isolation.
    """
    if f.degree < 1:
        raise InvalidInput("complex_roots needs degree >= 1")
    n = f.degree
    if n == 1:
        root = np.array([-f.coeffs[0] / f.coeffs[1]], dtype=complex)
        return ComplexRootSet(root, 0.0, "exact")
    low = 0
    while f.coeffs[low] == 0:
        low += 1
    if low:
        rest = complex_roots(IntegerPolynomial(f.coeffs[low:]), tol) if n - low >= 1 else None
        zeros = np.zeros(low, dtype=complex)
        roots = zeros if rest is None else np.concatenate([zeros, rest.roots])
        return ComplexRootSet(roots, 0.0 if rest is None else rest.residual_bound, "companion" if rest is None else rest.method)
    c = _scaled_float_coeffs(f)
    if not np.all(np.isfinite(c)):
        return certified_roots(f)
    roots = np.roots(c).astype(complex)
    if len(roots) != n or not np.all(np.isfinite(roots)):
        return certified_roots(f)
    for _ in range(3):
        p, dp = _horner_with_derivative(c.astype(complex), roots)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(dp != 0, p / dp, 0)
        step = np.where(np.isfinite(step) & (np.abs(step) < 1e-3 * np.maximum(1, np.abs(roots))), step, 0)
        roots = roots - step
    prec = 64 + 2 * f.max_abs_coeff().bit_length()
    steps = _newton_steps_arb(f, roots, prec)
    if np.all(np.abs(steps) <= tol * np.maximum(1.0, np.abs(roots))):
        return ComplexRootSet(np.sort_complex(roots), _relative_residual(f, roots), "companion")
    return certified_roots(f)


def aberth_roots(
    evaluate: Callable[[np.ndarray], np.ndarray],
    degree: int,
    radius: float,
    tol: float = 1e-14,
    max_iter: int = 500,
) -> np.ndarray | None:
    """Aberth-Ehrlich iteration driven by a Newton-ratio oracle F/F'.

    ``evaluate`` maps an array of points to F(z)/F'(z); this lets callers
    supply a numerically stable evaluation (for example by iterating a map)
    instead of expanded coefficients. Returns None without convergence.
    """
    k = np.arange(degree)
    z = radius * np.exp(2j * np.pi * (k + 0.25) / degree + 0.4j)
    done = np.zeros(degree, dtype=bool)
    for _ in range(max_iter):
        ratio = evaluate(z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        w[done] = 0.0
        z = z - w
        done |= np.abs(w) <= tol * np.maximum(1.0, np.abs(z))
        if done.all():
            return z
    return None


def mahler_log(f: IntegerPolynomial, roots: ComplexRootSet | None = None) -> float:
    """log|lead| + sum log+|root|."""
    if f.degree < 1:
        raise InvalidInput("mahler_log needs degree >= 1")
    if roots is None:
        roots = complex_roots(f)
    absr = np.abs(roots.roots)
    return math.log(abs(f.lead)) + float(np.sum(np.log(np.maximum(absr, 1.0))))


def image_polynomial(f: IntegerPolynomial, num: IntegerPolynomial, den: IntegerPolynomial) -> IntegerPolynomial:
    """Primitive part of Res_z(f(z), num(z) - w den(z)) as a polynomial in w.

    Roots of f sent to infinity drop out (the result has lower degree).
    """
    ctx = flint.fmpz_mpoly_ctx.get(("z", "w"), "lex")
    z, w = ctx.gens()

    def lift(p: IntegerPolynomial):
        out = 0 * z
        for i, c in enumerate(p.coeffs):
            if c:
                out += c * z**i
        return out

    g = lift(num) - w * lift(den)
    res = lift(f).resultant(g, "z")
    coeffs: dict[int, int] = {}
    for mono, c in zip(res.monoms(), res.coeffs()):
        coeffs[mono[1]] = int(c)
    deg = max(coeffs) if coeffs else 0
    out = IntegerPolynomial(coeffs.get(i, 0) for i in range(deg + 1))
    if out.degree < 1:
        raise OrbitAtInfinity("orbit maps entirely to infinity")
    return out.primitive()
