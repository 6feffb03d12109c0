import itertools
import random

import numpy as np
import pytest

from qint.coeff import q
from qint.invint import (
    check_invariant_tensor,
    check_theorem1,
    check_theorem2,
    classical_moment,
    euclid_integrate,
    invariant_tensor,
    invariant_tensor_solve,
    random_t_poly,
    sphere_integrate,
)
from qint.ncalg import NCPoly, conjugate, rules_for, substitute
from qint.radial import Form, RadialFunctional, RadialProfile
from qint.soq import build


def _setup(N):
    return build(N), rules_for(N)


def _cartesian_moments(N, n):
    """q = 1 sphere moments of t^i from real coordinates y on S^{N-1}.

    t^i = (y_a + i y_b)/sqrt2 and t^{i'} = (y_a - i y_b)/sqrt2 for i < i',
    the middle coordinate of odd N is y itself; so g_ij t^i t^j = |y|^2.
    E[y_a y_b y_c y_d ...] is the sum over pairings of deltas / N(N+2)...
    """
    A = np.zeros((N, N), dtype=complex)
    for i in range(1, N // 2 + 1):
        a, b = 2 * (i - 1), 2 * (i - 1) + 1
        A[i - 1, a], A[i - 1, b] = 1 / np.sqrt(2), 1j / np.sqrt(2)
        A[N - i, a], A[N - i, b] = 1 / np.sqrt(2), -1j / np.sqrt(2)
    if N % 2:
        A[N // 2, N - 1] = 1
    norm = np.prod([N + k for k in range(0, n, 2)])
    E = np.zeros((N,) * n)
    for ys in itertools.product(range(N), repeat=n):
        cnt = 0
        for perm in _pairings(list(range(n))):
            cnt += all(ys[a] == ys[b] for a, b in perm)
        E[ys] = cnt / norm
    T = E.astype(complex)
    for slot in range(n):
        T = np.tensordot(A, T, axes=([1], [slot]))
        T = np.moveaxis(T, 0, slot)
    return T


def _pairings(slots):
    if not slots:
        yield []
        return
    a = slots[0]
    for k in range(1, len(slots)):
        rest = slots[1:k] + slots[k + 1:]
        for p in _pairings(rest):
            yield [(a, slots[k])] + p


@pytest.mark.parametrize("N", [3, 4])
def test_i4_classical_limit_cartesian_oracle(N):
    s, rs = _setup(N)
    T = _cartesian_moments(N, 4)
    I4 = invariant_tensor(s, rs, 4).tensor.evaluate(1)
    for idx in itertools.product(range(1, N + 1), repeat=4):
        want = T[tuple(i - 1 for i in idx)]
        assert abs(want.imag) < 1e-12
        assert abs(float(I4.get(idx, 0)) - want.real) < 1e-12


@pytest.mark.parametrize("N", [3, 4, 5])
def test_routes_agree(N):
    s, rs = _setup(N)
    for n in (2, 4):
        assert invariant_tensor(s, rs, n).tensor == invariant_tensor_solve(s, n).tensor


def test_i6_routes_agree_n3():
    s, rs = _setup(3)
    I6 = invariant_tensor(s, rs, 6)
    assert I6.tensor == invariant_tensor_solve(s, 6).tensor
    assert all(c.passed for c in check_invariant_tensor(s, I6, invariant_tensor(s, rs, 4)))


@pytest.mark.parametrize("N", [3, 4, 5])
def test_classical_moment_table(N):
    s, rs = _setup(N)
    assert invariant_tensor(s, rs, 4).tensor.evaluate(1) == classical_moment(N, 4)


def test_i2_is_normalized_metric():
    s, rs = _setup(3)
    I2 = invariant_tensor(s, rs, 2).tensor
    for (i, j), v in s.g_upper.items():
        assert I2[i, j] == v / s.qdim


def test_sphere_basics():
    N = 3
    s, rs = _setup(N)
    one = NCPoly.const(N, 1)
    assert sphere_integrate(one, s, rs) == 1
    assert sphere_integrate(NCPoly.t(N, 1), s, rs) == 0
    # <g_ij t^i t^j> = 1
    tt = NCPoly(N)
    for (i, j), v in s.g_lower.items():
        tt = tt + NCPoly.t(N, i) * NCPoly.t(N, j) * v
    assert sphere_integrate(tt, s, rs) == 1


def test_cyclic_on_generators():
    # <t^i t^j> = <t^j (D t)^i>
    N = 4
    s, rs = _setup(N)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            ti, tj = NCPoly.t(N, i), NCPoly.t(N, j)
            lhs = sphere_integrate(ti * tj, s, rs)
            rhs = sphere_integrate(tj * substitute(ti, s, twist=True), s, rs)
            assert lhs == rhs


def test_theorem1_small():
    s, rs = _setup(3)
    res = check_theorem1(s, rs, samples=4, degree=3, seed=7)
    assert all(c.passed for c in res), [c for c in res if not c.passed]


def test_theorem1_n4():
    s, rs = _setup(4)
    res = check_theorem1(s, rs, samples=3, degree=2, seed=1, gram_degree=1)
    assert all(c.passed for c in res), [c for c in res if not c.passed]


def test_theorem2_small():
    s, rs = _setup(3)
    res = check_theorem2(s, rs, samples=4, seed=3)
    assert all(c.passed for c in res), [c for c in res if not c.passed]


def test_reality_random():
    N = 3
    s, rs = _setup(N)
    rng = random.Random(11)
    for _ in range(5):
        f = random_t_poly(N, 4, rng)
        assert sphere_integrate(conjugate(f, s), s, rs) == sphere_integrate(f, s, rs)


def test_euclid_integral_of_lattice_function():
    # f = indicator of r = q^n r0; the delta-weight sum of f(r) r^(N-1) gives q^n (q^n r0)^(N-1)
    N = 3
    s, rs = _setup(N)
    n = 2
    f = Form.function(rs, RadialProfile.lattice({n: 1}))
    val = euclid_integrate(f, s, rs)
    assert val.terms == {N - 1: q() ** n * q() ** (n * (N - 1))}


def test_window_integral_of_constant():
    # (q-1) sum_{n=0}^{l-1} (q^n r0)^N over the dr/r measure -> (q^{lN}-1)/(q^N-1)(q-1) r0^N
    N = 3
    s, rs = _setup(N)
    l = 4
    val = euclid_integrate(Form.function(rs, RadialProfile.one()), s, rs, RadialFunctional.finite_window(0, l))
    Q = q()
    assert val.terms == {N: (Q ** (l * N) - 1) / (Q**N - 1) * (Q - 1)}


def test_degree_guard(monkeypatch):
    s, rs = _setup(3)
    monkeypatch.setenv("QINT_MAX_DEGREE", "4")
    with pytest.raises(ValueError):
        invariant_tensor_solve(s, 6)
    monkeypatch.setenv("QINT_MAX_DEGREE", "x")
    with pytest.raises(ValueError):
        invariant_tensor_solve(s, 2)
