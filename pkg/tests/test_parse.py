from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qint.coeff import q
from qint.ncalg import NCPoly, rules_for
from qint.parse import (
    Add,
    LoweringError,
    Mul,
    Neg,
    Num,
    ParseError,
    Pow,
    Sym,
    parse,
    parse_poly,
    parse_scalar,
    to_text,
)
from qint.soq import build

N = 3


def test_metric_weighted_word():
    s = build(N)
    p = parse_poly("g[1,3] x[1] x[3]", N)
    assert p == NCPoly.x(N, 1) * NCPoly.x(N, 3) * s.g_lower[1, 3]
    assert parse_poly("g[1,2] x[1] x[2]", N).is_zero()


def test_mixed_sector():
    p = parse_poly("t[1]^2 + q*r", N)
    want = NCPoly.x(N, 1) * NCPoly.r(N, -1) * NCPoly.x(N, 1) * NCPoly.r(N, -1) + NCPoly.r(N) * q()
    assert p == want


def test_juxtaposition_keeps_order():
    a = parse_poly("x[1] x[2]", N)
    b = parse_poly("x[2] x[1]", N)
    assert a != b
    assert a == parse_poly("x[1]*x[2]", N)


def test_index_out_of_range():
    with pytest.raises(LoweringError, match="x\\[7\\]"):
        parse_poly("x[7]", N)


@pytest.mark.parametrize("text,line,col", [
    ("x[1] +", 1, 7),
    ("x[1]]", 1, 5),
    ("x[1] +\n  $", 2, 3),
    ("g[1]", 1, 1),
    ("", 1, 1),
])
def test_syntax_errors_have_positions(text, line, col):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert (e.value.line, e.value.col) == (line, col)


def test_negative_powers():
    assert parse_poly("r^-1", N) == NCPoly.r(N, -1)
    assert parse_scalar("(q+1)^-2 * (q+1)^2") == 1
    with pytest.raises(LoweringError):
        parse_poly("x[1]^-1", N)
    with pytest.raises(LoweringError):
        parse_scalar("(q - q)^-1")


def test_scalar_parse():
    assert parse_scalar("2/3 q^2 - q") == Fraction(2, 3) * q() ** 2 - q()
    with pytest.raises(LoweringError):
        parse_scalar("x[1]")


def test_degree_guard():
    with pytest.raises(LoweringError):
        parse_poly("(x[1] + x[2])^9", N, max_degree=8)


def test_lowered_poly_normalizes():
    rs = rules_for(N)
    s = build(N)
    p = parse_poly("g[1,3] x[1] x[3] + g[2,2] x[2] x[2] + g[3,1] x[3] x[1]", N, s)
    assert rs.normalize(p) == NCPoly.r(N, 2)


# random ASTs for the print/parse round trip
atoms = st.one_of(
    st.fractions(min_value=0, max_value=20, max_denominator=5).map(Num),
    st.sampled_from([Sym("q"), Sym("r")]),
    st.builds(lambda n, i: Sym(n, (i,)), st.sampled_from(["x", "dx", "del", "t"]), st.integers(1, 3)),
    st.builds(lambda i, j: Sym("g", (i, j)), st.integers(1, 3), st.integers(1, 3)),
)


def _extend(children):
    return st.one_of(
        st.builds(lambda a, rest: Add(((1, a),) + tuple(rest)), children,
                  st.lists(st.tuples(st.sampled_from([1, -1]), children), min_size=1, max_size=3)),
        st.builds(lambda fs: Mul(tuple(fs)), st.lists(children, min_size=2, max_size=3)),
        st.builds(Pow, children, st.integers(-2, 3)),
        st.builds(Neg, children),
    )


exprs = st.recursive(atoms, _extend, max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_print_parse_round_trip(node):
    text = to_text(node)
    again = parse(text)
    assert to_text(again) == text
    assert again == node
