"""Normalized rational maps over Q, example families, iteration and reduction data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegenerateMap, DegreeCapExceeded, InvalidInput
from .exact import Factorization, as_rational, factorize
from .polynomials import IntegerPolynomial, poly_gcd, render_polynomial, resultant

DEFAULT_DEGREE_CAP = 64


class _Infinity:
    """The point at infinity of the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def projective(x) -> tuple:
    """Homogeneous coordinates of a point: ints for rationals, complex otherwise."""
    if x is INFINITY:
        return (1, 0)
    if isinstance(x, (complex, float, np.complexfloating, np.floating)):
        return (complex(x), 1.0)
    q = as_rational(x)
    return (q.numerator, q.denominator)


@dataclass(frozen=True)
class IterationChain:
    """f^n as n applications of a base map, plus log of the removed content."""

    base: "RationalMap"
    n: int
    log_content: float


@dataclass(frozen=True)
class RationalMap:
    """f = P/Q with coprime integer P, Q of joint content 1 and lead(Q) > 0."""

    P: IntegerPolynomial
    Q: IntegerPolynomial
    chain: IterationChain | None = field(default=None, compare=False, repr=False)

    @property
    def d(self) -> int:
        return max(self.P.degree, self.Q.degree)

    @property
    def p(self) -> int:
        return self.P.degree

    @property
    def q(self) -> int:
        return self.Q.degree

    @property
    def lead_p(self) -> int:
        return self.P.lead

    @property
    def lead_q(self) -> int:
        return self.Q.lead

    def num_coeffs(self) -> tuple[int, ...]:
        """Numerator coefficients padded to length d + 1."""
        return self.P.coeffs + (0,) * (self.d + 1 - len(self.P.coeffs))

    def den_coeffs(self) -> tuple[int, ...]:
        return self.Q.coeffs + (0,) * (self.d + 1 - len(self.Q.coeffs))

    @property
    def is_polynomial(self) -> bool:
        return self.Q.degree == 0

    def __str__(self) -> str:
        return render(self)

    def __call__(self, x):
        return evaluate(self, x)


def normalize(num_coeffs: Sequence, den_coeffs: Sequence) -> RationalMap:
    """Clear denominators, cancel common factors and the joint content."""
    num = [as_rational(c) for c in num_coeffs]
    den = [as_rational(c) for c in den_coeffs]
    denoms = [c.denominator for c in num + den]
    lcm = math.lcm(*denoms) if denoms else 1
    P = IntegerPolynomial(int(c * lcm) for c in num)
    Q = IntegerPolynomial(int(c * lcm) for c in den)
    if Q.is_zero():
        raise DegenerateMap("denominator is zero")
    if P.is_zero():
        raise DegenerateMap("map is the constant 0")
    g = poly_gcd(P, Q)
    if g.degree > 0:
        P, Q = P.exact_quotient(g), Q.exact_quotient(g)
    return _from_integer_pair(P, Q)


def _from_integer_pair(P: IntegerPolynomial, Q: IntegerPolynomial) -> RationalMap:
    c = math.gcd(P.content(), Q.content())
    if Q.lead < 0:
        c = -c
    P = IntegerPolynomial(x // c for x in P.coeffs)
    Q = IntegerPolynomial(x // c for x in Q.coeffs)
    if max(P.degree, Q.degree) < 1:
        raise DegenerateMap("map is constant")
    if resultant(P, Q) == 0:
        raise DegenerateMap("numerator and denominator share a root")
    return RationalMap(P, Q)


def polynomial_map(coeffs: Sequence) -> RationalMap:
    return normalize(coeffs, [1])


def _homogeneous_compose(f: RationalMap, A: IntegerPolynomial, B: IntegerPolynomial, e: int):
    """Raw forms sum a_i A^i B^(d-i) and sum b_i A^i B^(d-i), A, B padded to degree e."""
    d = f.d
    apow = [IntegerPolynomial([1])]
    bpow = [IntegerPolynomial([1])]
    for _ in range(d):
        apow.append(apow[-1] * A)
        bpow.append(bpow[-1] * B)
    num = IntegerPolynomial()
    den = IntegerPolynomial()
    for i, (a, b) in enumerate(zip(f.num_coeffs(), f.den_coeffs())):
        if a == 0 and b == 0:
            continue
        term = apow[i] * bpow[d - i]
        if a:
            num = num + term * a
        if b:
            den = den + term * b
    return num, den


def compose_maps(f: RationalMap, g: RationalMap) -> RationalMap:
    """f o g, normalized."""
    num, den = _homogeneous_compose(f, g.P, g.Q, g.d)
    return _from_integer_pair(num, den)


def iterate(f: RationalMap, n: int, degree_cap: int = DEFAULT_DEGREE_CAP) -> RationalMap:
    """f^n, normalized, remembering the chain for stable numerical evaluation."""
    if n < 1:
        raise InvalidInput("iteration count must be >= 1")
    if f.d**n > degree_cap:
        raise DegreeCapExceeded(f"degree {f.d}^{n} exceeds cap {degree_cap}")
    if n == 1:
        return f
    base = f.chain.base if f.chain else f
    per = f.chain.n if f.chain else 1
    log_f = f.chain.log_content if f.chain else 0.0
    cur, log_c = f, log_f
    for _ in range(n - 1):
        # base-chain raw forms of f o cur are C_f * f_h(C_cur * cur) = C_f C_cur^D * c * next
        num, den = _homogeneous_compose(f, cur.P, cur.Q, cur.d)
        c = math.gcd(num.content(), den.content())
        log_c = log_f + f.d * log_c + math.log(c)
        cur = _from_integer_pair(num, den)
    return RationalMap(cur.P, cur.Q, IterationChain(base, per * n, log_c))


def evaluate(f: RationalMap, x):
    """f(x) for a rational, complex or infinite point."""
    X, Y = projective(x)
    d = f.d
    num = sum(a * X**i * Y ** (d - i) for i, a in enumerate(f.num_coeffs()))
    den = sum(b * X**i * Y ** (d - i) for i, b in enumerate(f.den_coeffs()))
    if isinstance(num, complex) or isinstance(den, complex) or isinstance(num, float):
        if den == 0:
            return INFINITY
        return complex(num) / complex(den)
    if den == 0:
        return INFINITY
    return Fraction(num, den)


def chebyshev(d: int) -> RationalMap:
    """Monic Chebyshev polynomial with T_d(z + 1/z) = z^d + z^-d."""
    if d < 2:
        raise InvalidInput("Chebyshev degree must be >= 2")
    t_prev, t = IntegerPolynomial([2]), IntegerPolynomial([0, 1])
    z = IntegerPolynomial([0, 1])
    for _ in range(d - 1):
        t_prev, t = t, z * t - t_prev
    return _from_integer_pair(t, IntegerPolynomial([1]))


def lattes(a: int, b: int) -> RationalMap:
    """(x^2 + ab)^2 / (4x(x - a)(x + b))."""
    if a < 1 or b < 1:
        raise InvalidInput("Lattes parameters must be positive")
    num = IntegerPolynomial([a * b, 0, 1]) ** 2
    den = IntegerPolynomial([0, 4]) * IntegerPolynomial([-a, 1]) * IntegerPolynomial([b, 1])
    return _from_integer_pair(num, den)


def conjugate_power_map(d: int, a, b) -> RationalMap:
    """phi^-1(phi(z)^d) with phi(z) = a z + b; negative d allowed."""
    a, b = as_rational(a), as_rational(b)
    if a == 0:
        raise InvalidInput("a must be nonzero")
    if abs(d) < 2:
        raise InvalidInput("|d| must be >= 2")
    m = abs(d)
    # (a z + b)^m as rational coefficients
    lin = [b, a]
    pw = [Fraction(1)]
    for _ in range(m):
        nxt = [Fraction(0)] * (len(pw) + 1)
        for i, c in enumerate(pw):
            nxt[i] += c * lin[0]
            nxt[i + 1] += c * lin[1]
        pw = nxt
    if d > 0:
        num = [c / a for c in pw]
        num[0] -= b / a
        return normalize(num, [1])
    num = [-b * c for c in pw]
    num[0] += 1
    den = [a * c for c in pw]
    return normalize(num, den)


@dataclass(frozen=True)
class ReductionDatum:
    R: int
    bad_primes: Factorization | None = None


def reduction_datum(f: RationalMap, with_primes: bool = False) -> ReductionDatum:
    """R = a_p^(d-q) b_q^(d-p) Res(P, Q); |R|_p = 1 signals explicit good reduction."""
    d, p, q = f.d, f.p, f.q
    R = f.lead_p ** (d - q) * f.lead_q ** (d - p) * resultant(f.P, f.Q)
    fac = factorize(R) if with_primes else None
    return ReductionDatum(R, fac)


def render(f: RationalMap) -> str:
    num = render_polynomial(f.P.coeffs)
    if f.Q.coeffs == (1,):
        return num
    return f"({num})/({render_polynomial(f.Q.coeffs)})"


# ---------------------------------------------------------------------------
# numerical homogeneous evaluation


def _float_forms(f: RationalMap):
    scale = max(max(abs(a) for a in f.num_coeffs()), max(abs(b) for b in f.den_coeffs()))
    num = np.array([a / scale for a in f.num_coeffs()])
    den = np.array([b / scale for b in f.den_coeffs()])
    return num, den, math.log(scale)


def _apply_forms(num, den, log_scale, X, Y, dX=None, dY=None):
    """One homogeneous step on points with max(|X|, |Y|) <= 1.

    Returns rescaled (A, B), the log of the factor removed, and the
    forward-mode derivatives when (dX, dY) are given.
    """
    d = len(num) - 1
    xp = [np.ones_like(X)]
    yp = [np.ones_like(Y)]
    for _ in range(d):
        xp.append(xp[-1] * X)
        yp.append(yp[-1] * Y)
    A = sum(num[i] * xp[i] * yp[d - i] for i in range(d + 1))
    B = sum(den[i] * xp[i] * yp[d - i] for i in range(d + 1))
    s = np.maximum(np.abs(A), np.abs(B))
    s = np.where(s > 0, s, 1.0)
    out_log = np.log(s) + log_scale
    if dX is None:
        return A / s, B / s, out_log, None, None
    dA = sum(
        num[i] * ((i * xp[i - 1] * yp[d - i] * dX if i else 0) + ((d - i) * xp[i] * yp[d - i - 1] * dY if d - i else 0))
        for i in range(d + 1)
    )
    dB = sum(
        den[i] * ((i * xp[i - 1] * yp[d - i] * dX if i else 0) + ((d - i) * xp[i] * yp[d - i - 1] * dY if d - i else 0))
        for i in range(d + 1)
    )
    return A / s, B / s, out_log, dA / s, dB / s


def projective_orbit(f: RationalMap, X, Y, dX=None, dY=None):
    """Apply the normalized forms of f to projective points numerically.

    Uses the stored iteration chain when present, which avoids expanding
    huge iterate coefficients. Returns (A, B, L, dA, dB) where the exact
    normalized forms evaluated at (X, Y) equal e^L (A, B); derivatives
    (when requested) carry the same factor e^L.
    """
    base, n, log_c = (f.chain.base, f.chain.n, f.chain.log_content) if f.chain else (f, 1, 0.0)
    num, den, ls = _float_forms(base)
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    s = np.maximum(np.abs(X), np.abs(Y))
    L = np.log(s)
    X, Y = X / s, Y / s
    if dX is not None:
        dX = np.asarray(dX, dtype=complex) / s
        dY = np.asarray(dY, dtype=complex) / s
    for _ in range(n):
        X, Y, step_log, dX, dY = _apply_forms(num, den, ls, X, Y, dX, dY)
        L = base.d * L + step_log
    return X, Y, L - log_c, dX, dY
