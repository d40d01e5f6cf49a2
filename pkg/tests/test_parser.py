from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adelic_energy.battery import example_maps, random_maps
from adelic_energy.errors import DegenerateMap, ParseError
from adelic_energy.maps import chebyshev, lattes, normalize, polynomial_map, render
from adelic_energy.parser import map_from_json, parse_expression, parse_map, parse_rational_function


@pytest.mark.parametrize(
    "text, want",
    [
        ("z^2 - 2", chebyshev(2)),
        ("(x^2+6)^2/(4*x*(x-2)*(x+3))", lattes(2, 3)),
        ("z**3 - 3z", chebyshev(3)),
        ("(z^2 + 1) / (2 z)", normalize([1, 0, 1], [0, 2])),
        ("0.5 z^2", polynomial_map([0, 0, Fraction(1, 2)])),
        ("z^-2", normalize([1], [0, 0, 1])),
        ("-(z - 1)^2 + 1/3", polynomial_map([Fraction(-2, 3), 2, -1])),
    ],
)
def test_expressions(text, want):
    assert parse_expression(text) == want


def test_constant_folding_is_exact():
    num, den = parse_rational_function("(1/3 + 1/6) z")
    assert [Fraction(c) / den[0] for c in num] == [0, Fraction(1, 2)]


def test_degenerate_expression_parses_then_fails():
    parse_rational_function("z^2 - z^2")
    with pytest.raises(DegenerateMap):
        parse_expression("z^2 - z^2")


@pytest.mark.parametrize(
    "text, offset",
    [("z^^2", 2), ("z + ", 4), ("(z + 1", 6), ("z*y", 2), ("z + x", 4), ("z^1.5", 2), ("z $ 1", 2), ("", 0), ("z)", 1)],
)
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        parse_expression(text)
    assert info.value.offset == offset
    assert f"at offset {offset}" in str(info.value)


def test_division_by_zero_constant():
    with pytest.raises((ParseError, DegenerateMap)):
        parse_expression("z / 0")


def test_json_maps():
    assert map_from_json({"num": [-2, 0, 1]}) == chebyshev(2)
    assert map_from_json({"num": ["1", 0, 1], "den": [0, "2"]}) == normalize([1, 0, 1], [0, 2])
    assert parse_map('{"num": ["1/2", 0, 1]}') == polynomial_map([Fraction(1, 2), 0, 1])
    assert parse_map("z^2") == polynomial_map([0, 0, 1])
    for bad in ('{"num": [1, 0, }', '{"den": [1]}', '{"num": []}', '{"num": ["abc"]}'):
        with pytest.raises(ParseError):
            parse_map(bad)


def test_render_round_trip_on_battery_maps():
    for f in list(example_maps().values()) + random_maps():
        assert parse_expression(render(f)) == f


small = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 9))


@given(st.lists(small, min_size=3, max_size=5))
def test_round_trip_random_polynomials(coeffs):
    if coeffs[-1] == 0:
        return
    f = polynomial_map(coeffs)
    assert parse_expression(render(f)) == f
