"""Places of the rationals, p-adic absolute values and integer factorization."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import FactorizationTimeout, InvalidInput, InvalidPlace

Rational = Fraction

DEFAULT_FACTOR_BUDGET = 10**7
DEFAULT_FACTOR_SEED = 0x5EED

# Bases making Miller-Rabin deterministic below 3.3e24.
_MR_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
_MR_EXTRA_ROUNDS = 24

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, int(p**0.5) + 1))]


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and rational strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise InvalidInput(f"not an exact rational: {x!r}")


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, fixed seeded rounds above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def witness(a: int) -> bool:
        x = pow(a, d, n)
        if x in (1, n - 1):
            return False
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                return False
        return True

    if n < _MR_DETERMINISTIC_LIMIT:
        return not any(witness(a) for a in _MR_DETERMINISTIC_BASES)
    if any(witness(a) for a in _MR_DETERMINISTIC_BASES):
        return False
    rng = random.Random(n)
    return not any(witness(rng.randrange(2, n - 1)) for _ in range(_MR_EXTRA_ROUNDS))


@dataclass(frozen=True)
class Place:
    """A place of Q: ``p is None`` for the real place, otherwise a prime."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise InvalidPlace(f"{self.p} is not prime")

    @classmethod
    def archimedean(cls) -> "Place":
        return cls(None)

    @classmethod
    def prime(cls, p: int) -> "Place":
        return cls(int(p))

    @property
    def is_archimedean(self) -> bool:
        return self.p is None

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)


ARCHIMEDEAN = Place()


@dataclass(frozen=True)
class Factorization:
    unit_sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        out = self.unit_sign
        for p, e in self.factors:
            out *= p**e
        return out

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise InvalidInput("valuation of zero")
    v = 0
    n = abs(n)
    # Square-and-divide keeps huge powers cheap.
    while n % p == 0:
        pk, k = p, 1
        while n % (pk * pk) == 0:
            pk *= pk
            k *= 2
        n //= pk
        v += k
    return v


def rational_valuation(x, p: int) -> int:
    x = as_rational(x)
    if x == 0:
        raise InvalidInput("valuation of zero")
    return valuation(x.numerator, p) - valuation(x.denominator, p)


def log_abs(x, v: Place) -> float:
    """log|x|_v in nats."""
    x = as_rational(x)
    if x == 0:
        raise InvalidInput("log_abs of zero")
    if v.is_archimedean:
        return log_int(abs(x.numerator)) - log_int(x.denominator)
    return -rational_valuation(x, v.p) * math.log(v.p)


def log_int(n: int) -> float:
    """Natural log of a positive integer of any size."""
    return math.log(n)


def _brent_rho(n: int, rng: random.Random, budget: list[int]) -> int | None:
    """One Pollard-Brent attempt; returns a nontrivial factor or None."""
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            steps = min(m, r - k)
            for _ in range(steps):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            budget[0] -= steps
            if budget[0] < 0:
                return None
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            budget[0] -= 1
            if g > 1:
                break
    return g if g != n else None


def factorize(n: int, budget: int = DEFAULT_FACTOR_BUDGET, seed: int = DEFAULT_FACTOR_SEED) -> Factorization:
    """Trial division, then Pollard-Brent rho on composite cofactors."""
    if n == 0:
        raise InvalidInput("cannot factor zero")
    sign = 1 if n > 0 else -1
    n = abs(n)
    found: dict[int, int] = {}
    steps = [budget]
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        steps[0] -= 1
        if n % p == 0:
            e = valuation(n, p)
            found[p] = e
            n //= p**e
    rng = random.Random(seed)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        g = None
        while g is None:
            if steps[0] < 0:
                break
            g = _brent_rho(m, rng, steps)
        if g is None:
            rest = m
            for k in stack:
                rest *= k
            partial = Factorization(sign, tuple(sorted(found.items())))
            raise FactorizationTimeout(f"budget exhausted with cofactor of {rest.bit_length()} bits", partial, rest)
        stack += [g, m // g]
    return Factorization(sign, tuple(sorted(found.items())))


def prime_support(x) -> tuple[int, ...]:
    x = as_rational(x)
    if x == 0:
        raise InvalidInput("support of zero")
    ps = set(factorize(x.numerator).primes) | set(factorize(x.denominator).primes)
    return tuple(sorted(ps))


def product_formula_residual(x) -> float:
    """log|x|_inf + sum_p log|x|_p, which vanishes for nonzero x."""
    x = as_rational(x)
    if x == 0:
        raise InvalidInput("product formula of zero")
    total = log_abs(x, ARCHIMEDEAN)
    for p in prime_support(x):
        total += log_abs(x, Place.prime(p))
    return total
