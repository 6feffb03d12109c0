from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qint.coeff import eval_numeric, q
from qint.radial import R0Poly, RadialFunctional, RadialProfile, radial_integrate

coef = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def profiles(draw, compact=True):
    support = draw(st.dictionaries(st.integers(-4, 4), coef, max_size=4))
    h = RadialProfile.lattice(support, m=draw(st.integers(-2, 2)))
    if not compact:
        h = h + RadialProfile.power(draw(st.integers(-2, 2)), draw(coef))
    return h


def test_lattice_values():
    h = RadialProfile.lattice({0: 2, 3: 1}, m=1)
    assert h.is_compact()
    # h(q^3 r0) = (q^3 r0)^1
    assert h.value_at(3) == R0Poly({1: q() ** 3})
    assert h.value_at(1).is_zero()


def test_power_profile_values():
    h = RadialProfile.power(2, 5)
    assert h.value_at(-1) == R0Poly({2: 5 * q() ** -2})
    assert not h.is_compact()


@settings(max_examples=50, deadline=None)
@given(profiles(compact=False), st.integers(-3, 3), st.integers(-3, 3))
def test_shift_composes(h, a, b):
    assert h.shift(a).shift(b) == h.shift(a + b)
    for n in (-2, 0, 5):
        assert h.shift(a).value_at(n) == h.value_at(n + a)


@settings(max_examples=50, deadline=None)
@given(profiles())
def test_jackson_scaling_law(h):
    # <h(q r)>_r = q^-1 <h(r)>_r
    F = RadialFunctional.jackson_delta()
    assert radial_integrate(h.shift(1), F) == radial_integrate(h, F) * q() ** -1


def test_delta_needs_compact_profile():
    with pytest.raises(ValueError):
        RadialFunctional.jackson_delta().integrate(RadialProfile.power(1))


def test_window_geometric_series():
    # (q-1) sum_{n=k}^{l-1} (q^n r0)^m
    k, l, m = -2, 5, 3
    val = RadialFunctional.finite_window(k, l).integrate(RadialProfile.power(m))
    Q = q()
    want = (Q - 1) * sum((Q ** (n * m) for n in range(k, l)), start=0 * Q)
    assert val == R0Poly({m: want})


def test_window_rejects_empty():
    with pytest.raises(ValueError):
        RadialFunctional.finite_window(3, 3)


def test_riemann_sum_small_window():
    # f = r^2 on [1, q^l] with q = 1.01: within 1% of (q^{2l} - 1)/2
    q0 = Fraction(101, 100)
    l = 70
    val = RadialFunctional.finite_window(0, l).integrate(RadialProfile.power(2))
    approx = val.evaluate(q0, 1)
    exact = (q0 ** (2 * l) - 1) / 2
    assert abs(approx - exact) / exact < Fraction(1, 100)


def test_r0poly_arithmetic():
    a = R0Poly({1: q(), 0: 2})
    b = R0Poly({1: -q()})
    assert a + b == R0Poly({0: 2})
    assert (a * b).terms == {2: -q() ** 2, 1: -2 * q()}
    assert a.evaluate(2, 3) == 8
    assert eval_numeric(R0Poly({0: q()}).scalar(), 5) == 5
