import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfspec.dsl import BinOp, Call, Neg, Num, Param, Var, bind, eval_jet, parse, pretty, symbol_from_expression
from bfspec.errors import (
    DomainError,
    ExtrapolationDiverged,
    NonDifferentiable,
    ParseError,
    UnknownFunction,
    UnknownParameter,
)
from bfspec.symbols import DSL_TWINS, make_catalog_symbol

from .conftest import CATALOG_SAMPLES


def test_grammar_example():
    ast = parse("xi^2 + b*xi^4")
    assert ast == BinOp("+", BinOp("^", Var(), Num(2.0)), BinOp("*", Param("b"), BinOp("^", Var(), Num(4.0))))


def test_precedence_and_associativity():
    assert parse("-xi^2") == Neg(BinOp("^", Var(), Num(2.0)))
    assert parse("2^3^2") == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))
    assert parse("a - b - c") == BinOp("-", BinOp("-", Param("a"), Param("b")), Param("c"))
    assert parse("  xi*  2 ") == parse("xi*2")
    assert parse("xi**2") == parse("xi^2")


def test_whitham_text_parses():
    assert isinstance(parse("sqrt(tanh(h*xi)/xi)"), Call)


@pytest.mark.parametrize("text,offset", [("xi +", 4), ("(xi", 3), ("xi $ 2", 3), ("", 0), ("2 xi", 2)])
def test_parse_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset == offset
    assert info.value.expected


def test_unknown_function_and_parameter():
    with pytest.raises(UnknownFunction):
        parse("log(xi)")
    with pytest.raises(UnknownParameter):
        bind(parse("a*xi"), {})


def test_basic_jets():
    assert eval_jet(parse("xi^2"), {}, 1.0).as_tuple() == (1.0, 2.0, 2.0)
    assert eval_jet(parse("abs(xi)"), {}, 0.0).as_tuple() == (0.0, 1.0, 0.0)
    j = eval_jet(parse("sqrt(xi)+1"), {}, 1.0)
    assert j.as_tuple() == pytest.approx((2.0, 0.5, -0.25), rel=1e-15)


def test_errors_in_evaluation():
    with pytest.raises(DomainError):
        eval_jet(parse("sqrt(xi - 5)"), {}, 1.0)
    with pytest.raises(DomainError):
        eval_jet(parse("1/(xi - 1)"), {}, 1.0)
    with pytest.raises(NonDifferentiable):
        bind(parse("sqrt(abs(xi - 1) + 1)"), {})
    with pytest.raises(ExtrapolationDiverged):
        eval_jet(parse("abs(xi)^2.5"), {}, 0.0)


@pytest.mark.parametrize("kind,params", CATALOG_SAMPLES)
def test_dsl_twins_match_catalog(kind, params):
    cat = make_catalog_symbol(kind, **params)
    dsl = symbol_from_expression(DSL_TWINS[kind], params)
    for x in [0.0, *np.linspace(0.1, 10.0, 25)]:
        a, b = dsl.jet(x).as_tuple(), cat.jet(x).as_tuple()
        for u, v in zip(a, b):
            assert u == pytest.approx(v, rel=1e-8, abs=1e-10)


def test_removable_singularities():
    # xi*coth(h xi) has a 0/0 at the origin that must cancel
    j = eval_jet(parse("xi*coth(h*xi) - 1/h"), {"h": 1.0}, 0.0)
    assert j.as_tuple() == pytest.approx((0.0, 0.0, 2 / 3), abs=1e-14)
    j = eval_jet(parse("sqrt(tanh(h*xi)/xi)"), {"h": 2.0}, 0.0)
    assert j.as_tuple() == pytest.approx((math.sqrt(2), 0.0, -1.8856180831641267), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("text,params", [(t, p) for k, p in CATALOG_SAMPLES for t in [DSL_TWINS[k]]])
def test_first_derivative_matches_differences(text, params):
    ast = parse(text)
    for x in (0.3, 1.0, 2.5):
        h = 1e-5
        fd = (eval_jet(ast, params, x + h).value - eval_jet(ast, params, x - h).value) / (2 * h)
        assert fd == pytest.approx(eval_jet(ast, params, x).d1, rel=1e-6, abs=1e-9)


def test_growth_exponent_estimates():
    expected = {"whitham": -0.5, "kawahara": 4.0, "ilw": 1.0, "kdv": 2.0, "fkdv": 3.0, "benjamin_ono": 1.0}
    for kind, params in CATALOG_SAMPLES:
        if kind in expected:
            assert symbol_from_expression(DSL_TWINS[kind], params).growth_exponent == expected[kind]


# random expressions for the pretty-print round trip
_leaf = st.one_of(
    st.just(Var()),
    st.sampled_from([Param("a"), Param("b")]),
    st.floats(0.25, 4.0).map(lambda v: Num(round(v, 3))),
)


def _extend(children):
    return st.one_of(
        st.builds(BinOp, st.sampled_from(["+", "-", "*"]), children, children),
        st.builds(Neg, children),
        st.builds(Call, st.sampled_from(["tanh", "exp", "sinh", "cosh"]), children),
    )


@given(st.recursive(_leaf, _extend, max_leaves=8))
@settings(max_examples=60, deadline=None)
def test_pretty_round_trip(ast):
    again = parse(pretty(ast))
    params = {"a": 0.7, "b": 1.3}
    for x in (0.4, 1.1):
        try:
            want = eval_jet(ast, params, x).as_tuple()
        except (OverflowError, DomainError):
            continue
        got = eval_jet(again, params, x).as_tuple()
        assert np.allclose(got, want, rtol=1e-13, atol=1e-13, equal_nan=True)
