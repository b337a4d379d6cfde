"""Grammar: parsing, canonical printing, and error reporting."""

import pytest

from approxlie import expr as ex
from approxlie.parser import (ExprSyntaxError, UnknownFunction, UnknownSymbol,
                              parse, render)

ROUND_TRIPS = [
    "x + y",
    "5*u0_x*u0_xx",
    "x^2 - y^2",
    "3/4*x",
    "(x + y)^3",
    "x^(-2)",
    "arctan(y/x)",
    "log(x^2 + y^2)",
    "sin(b*x)*exp(-b*y)",
    "u1_xyy + v0_xx - p1_y",
    "k1*Re/2*y*arctan(y/x) + c2*x + c1*y",
    "U0_ww - w*P1_w",
]


@pytest.mark.parametrize("text", ROUND_TRIPS)
def test_round_trip_structural(text):
    e = parse(text)
    assert parse(render(e)) == e


def test_literal_sum_example():
    e = parse("x + y")
    assert isinstance(e, ex.Sum)
    assert set(e.terms) == {parse("x"), parse("y")}


def test_jet_product_example():
    e = parse("5*u0_x*u0_xx")
    assert isinstance(e, ex.Prod)
    assert e.coeff == 5
    assert {f.sym.name for f in e.factors} == {"u0_x", "u0_xx"}


def test_unbalanced_parenthesis_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse("arctan(y/x")
    assert err.value.position == 11


def test_unknown_transcendental():
    with pytest.raises(UnknownFunction):
        parse("tanh(x)")


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse("zzz + 1")


def test_bad_derivative_suffix():
    with pytest.raises(UnknownSymbol):
        parse("u0_xz")


def test_exponent_forms():
    assert parse("x^-2") == parse("x^(-2)")
    with pytest.raises(ExprSyntaxError):
        parse("x^y")


def test_whole_name_beats_suffix_split():
    # u_shear is a registered parameter even though u is a function
    e = parse("u_shear")
    assert e.sym.name == "u_shear"
    # while u_x still resolves as a derivative of u
    assert parse("u_x").sym.name == "u_x"


def test_deterministic_printing():
    e = parse("y*x + x^2*b + 2*x*y")
    assert render(parse(render(e))) == render(e)


def test_unary_and_division():
    assert ex.sub(parse("-x^2"), parse("-(x^2)")) is ex.ZERO
    assert parse("x/y/2") == parse("x*y^-1*1/2")
