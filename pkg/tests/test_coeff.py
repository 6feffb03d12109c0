from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from qint.coeff import (
    ONE,
    ZERO,
    HalfPowerError,
    PoleError,
    QScalar,
    analytic_at_one,
    eval_numeric,
    expand_at_one,
    q,
    qint_number,
    sqrt_q,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def scalars(draw, half=False):
    """Random ratio of Laurent polynomials."""
    lo = draw(st.integers(-3, 3))
    num = draw(st.lists(small, min_size=1, max_size=4))
    den = draw(st.lists(small, min_size=1, max_size=3).filter(lambda c: any(c)))
    a = QScalar.from_laurent(num, lo, half=half)
    b = QScalar.from_laurent(den, 0, half=half)
    return a / b


def test_basic_arithmetic():
    Q = q()
    assert (Q + 1) * (Q - 1) == Q**2 - 1
    assert (Q**2 - 1) / (Q - 1) == Q + 1
    assert sqrt_q() ** 2 == Q
    assert Q**-1 * Q == ONE
    assert QScalar(Fraction(3, 4)) == Fraction(3, 4)
    assert not ZERO


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        q() / ZERO


@settings(max_examples=60, deadline=None)
@given(scalars(), scalars(), scalars())
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    if a:
        assert a * a.inverse() == ONE


@settings(max_examples=60, deadline=None)
@given(scalars(half=True))
def test_json_round_trip(a):
    assert QScalar.from_json(a.to_json()) == a


@settings(max_examples=40, deadline=None)
@given(scalars(), st.sampled_from([Fraction(1, 2), Fraction(4, 5), Fraction(3), Fraction(5, 4)]))
def test_eval_matches_sympy(a, q0):
    x = sp.Symbol("q")
    expr = sp.sympify(str(a).replace("^", "**"), locals={"q": x})
    try:
        v = eval_numeric(a, q0)
    except PoleError:
        assert sp.denom(sp.together(expr)).subs(x, sp.Rational(q0.numerator, q0.denominator)) == 0
        return
    assert sp.Rational(v.numerator, v.denominator) == sp.nsimplify(expr.subs(x, sp.Rational(q0.numerator, q0.denominator)))


def test_half_power_evaluation():
    assert eval_numeric(sqrt_q() * 3, 4) == 6
    with pytest.raises(HalfPowerError):
        eval_numeric(sqrt_q(), 2)


def test_qint_numbers():
    # [n]_q = (q^n - 1)/(q - 1) -> n at q = 1
    for n in range(1, 6):
        assert eval_numeric(qint_number(n), 1) == n


@pytest.mark.parametrize("text", ["(q**3 - 1)/(q - 1)**2", "q**2/(q + 1)", "(q**5 - 2*q + 1)/(q**2 - 1)", "1/(q**2 + q + 1)"])
def test_expansion_matches_sympy(text):
    x, e = sp.symbols("q e")
    expr = sp.sympify(text, locals={"q": x})
    a = eval(text.replace("q", "q()").replace("**", "**"), {"q": q})
    exp = expand_at_one(a, 4)
    ser = sp.series(expr.subs(x, 1 + e), e, 0, 5).removeO()
    for k in range(5):
        assert sp.Rational(exp.coeffs[k].numerator, exp.coeffs[k].denominator) == ser.coeff(e, k)
    assert exp.analytic == analytic_at_one(a)
    if not exp.analytic:
        assert exp.principal[0] == sp.limit(expr.subs(x, 1 + e) * e ** exp.pole_order, e, 0)


def test_half_power_expansion():
    # q^(1/2) = 1 + e/2 - e^2/8 + ...
    exp = expand_at_one(sqrt_q(), 2)
    assert exp.coeffs == [1, Fraction(1, 2), Fraction(-1, 8)]
