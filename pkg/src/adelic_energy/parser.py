"""Map expressions: a small recursive-descent parser with exact constant folding.

Grammar (whitespace ignored, single variable z or x):

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/" | <juxtaposition>) unary)*
    unary  := ("+" | "-") unary | power
    power  := atom (("^" | "**") ["+" | "-"] INTEGER)?
    atom   := NUMBER | VAR | "(" expr ")"

NUMBER is an integer or a terminating decimal; both are folded as exact
rationals. Values are kept as a pair of rational-coefficient polynomials.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import ParseError
from .exact import as_rational
from .maps import RationalMap, normalize

MAX_EXPONENT = 4096
VARIABLES = ("z", "x")

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|(\*\*|[-+*/^()])|([A-Za-z_]\w*))")


@dataclass(frozen=True)
class _Token:
    kind: str  # num, op, var, end
    text: str
    offset: int


def _tokenize(source: str) -> list[_Token]:
    raw = source.encode("utf-8")
    tokens, pos = [], 0
    text = raw.decode("utf-8")
    # offsets are reported in bytes; track them alongside character positions
    byte_at = [0]
    for ch in text:
        byte_at.append(byte_at[-1] + len(ch.encode("utf-8")))
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", byte_at[start])
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(_Token("num", m.group(1), byte_at[start]))
        elif m.group(2):
            tokens.append(_Token("op", m.group(2), byte_at[start]))
        else:
            tokens.append(_Token("var", m.group(3), byte_at[start]))
        pos = m.end()
    tokens.append(_Token("end", "", byte_at[len(text)]))
    return tokens


# polynomials as lists of Fractions, low degree first


def _trim(a: list[Fraction]) -> list[Fraction]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _add(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _neg(a):
    return [-x for x in a]


def _pow(a, e):
    out, base = [Fraction(1)], a
    while e:
        if e & 1:
            out = _mul(out, base)
        base = _mul(base, base)
        e >>= 1
    return out


@dataclass
class _Frac:
    num: list[Fraction]
    den: list[Fraction]

    def __add__(self, o):
        return _Frac(_add(_mul(self.num, o.den), _mul(o.num, self.den)), _mul(self.den, o.den))

    def __sub__(self, o):
        return self + _Frac(_neg(o.num), o.den)

    def __mul__(self, o):
        return _Frac(_mul(self.num, o.num), _mul(self.den, o.den))


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0
        self.var: str | None = None

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _take(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def _is(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> _Frac:
        value = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return value

    def expr(self) -> _Frac:
        value = self.term()
        while self._is("+", "-"):
            op = self._take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _starts_atom(self) -> bool:
        return self.tok.kind in ("num", "var") or self._is("(")

    def term(self) -> _Frac:
        value = self.unary()
        while self._is("*", "/") or self._starts_atom():
            if self._starts_atom():
                value = value * self.unary()
                continue
            op = self._take()
            rhs = self.unary()
            if op.text == "*":
                value = value * rhs
            else:
                if not rhs.num:
                    raise ParseError("division by zero", op.offset)
                value = value * _Frac(rhs.den, rhs.num)
        return value

    def unary(self) -> _Frac:
        if self._is("+", "-"):
            op = self._take().text
            inner = self.unary()
            return inner if op == "+" else _Frac(_neg(inner.num), inner.den)
        return self.power()

    def power(self) -> _Frac:
        base = self.atom()
        if not self._is("^", "**"):
            return base
        op = self._take()
        sign = 1
        if self._is("+", "-"):
            sign = -1 if self._take().text == "-" else 1
        t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            raise ParseError("exponent must be an integer", t.offset)
        self._take()
        e = int(t.text)
        if e > MAX_EXPONENT:
            raise ParseError(f"exponent exceeds {MAX_EXPONENT}", t.offset)
        if sign < 0:
            if not base.num:
                raise ParseError("zero to a negative power", op.offset)
            base = _Frac(base.den, base.num)
        return _Frac(_pow(base.num, e), _pow(base.den, e))

    def atom(self) -> _Frac:
        t = self.tok
        if t.kind == "num":
            self._take()
            return _Frac(_trim([Fraction(t.text)]), [Fraction(1)])
        if t.kind == "var":
            if t.text not in VARIABLES:
                raise ParseError(f"unknown name {t.text!r}; use z or x", t.offset)
            if self.var is not None and t.text != self.var:
                raise ParseError("mixed variables", t.offset)
            self.var = t.text
            self._take()
            return _Frac([Fraction(0), Fraction(1)], [Fraction(1)])
        if self._is("("):
            self._take()
            value = self.expr()
            if not self._is(")"):
                raise ParseError("expected ')'", self.tok.offset)
            self._take()
            return value
        if t.kind == "end":
            raise ParseError("unexpected end of input", t.offset)
        raise ParseError(f"unexpected {t.text!r}", t.offset)


def parse_rational_function(source: str) -> tuple[list[Fraction], list[Fraction]]:
    """Numerator and denominator coefficients (low degree first), not yet reduced."""
    value = _Parser(source).parse()
    return value.num, value.den


def parse_expression(source: str) -> RationalMap:
    num, den = parse_rational_function(source)
    return normalize(num or [0], den)


def _coeff_list(value: Any, key: str) -> list[Fraction]:
    if not isinstance(value, list) or not value:
        raise ParseError(f"'{key}' must be a nonempty list", 0)
    try:
        return [as_rational(c) for c in value]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"bad coefficient in '{key}': {exc}", 0) from exc


def map_from_json(obj: Any) -> RationalMap:
    """{"num": [...], "den": [...]} with coefficients low degree first, or an expression string."""
    if isinstance(obj, str):
        return parse_expression(obj)
    if not isinstance(obj, dict) or "num" not in obj:
        raise ParseError("map object needs a 'num' list", 0)
    num = _coeff_list(obj["num"], "num")
    den = _coeff_list(obj.get("den", [1]), "den")
    return normalize(num, den)


def parse_map(spec: Any) -> RationalMap:
    """Expression string, JSON text of a coefficient object, or the object itself."""
    if isinstance(spec, str) and spec.lstrip().startswith("{"):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from exc
    return map_from_json(spec)
