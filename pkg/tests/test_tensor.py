import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qint.coeff import QScalar, q
from qint.tensor import LabeledTensor, ShapeError, compose2, contract, delta, flip2, identity2, trace_pair

N = 3


@st.composite
def tensors(draw, rank):
    ents = {}
    for idx in itertools.product(range(1, N + 1), repeat=rank):
        v = draw(st.integers(-3, 3))
        if v:
            ents[idx] = QScalar(v) * q() ** draw(st.integers(-1, 1))
    return LabeledTensor(rank, N, ents)


def _dense(t, q0):
    a = np.zeros((N,) * t.rank, dtype=object)
    for idx, v in t.evaluate(q0).items():
        a[tuple(i - 1 for i in idx)] = v
    return a


@settings(max_examples=30, deadline=None)
@given(tensors(3), tensors(2))
def test_contract_matches_numpy(a, b):
    # contract slot 2 of a with slot 1 of b; compare with tensordot at q = 2
    c = contract(a, 2, b, 1)
    want = np.tensordot(_dense(a, 2), _dense(b, 2), axes=([1], [0]))
    got = _dense(c, 2)
    assert (want == got).all()


@settings(max_examples=30, deadline=None)
@given(tensors(4))
def test_json_round_trip(t):
    assert LabeledTensor.from_json(t.to_json()) == t


def test_zero_entries_are_dropped():
    t = LabeledTensor(2, 2, {(1, 1): QScalar(0), (1, 2): QScalar(1)})
    assert len(t) == 1
    assert t[1, 1] == 0


def test_flip_and_identity():
    f = flip2(N)
    assert compose2(f, f) == identity2(N)
    assert f[1, 2, 2, 1] == 1 and f[1, 2, 1, 2] == 0


def test_permute_inverse():
    t = LabeledTensor(3, N, {(1, 2, 3): QScalar(Fraction(1, 2)), (3, 3, 1): q()})
    assert t.permute((1, 2, 0)).permute((2, 0, 1)) == t


def test_trace_pair_with_identity_metric():
    g = delta(N)
    t = LabeledTensor(2, N, {(i, i): QScalar(i) for i in range(1, N + 1)})
    assert trace_pair(g, t, 1).scalar() == 6


def test_shape_errors():
    a = LabeledTensor(2, 3)
    b = LabeledTensor(2, 4)
    with pytest.raises(ShapeError):
        contract(a, 1, b, 1)
    with pytest.raises(ShapeError):
        contract(a, 3, a, 1)
    with pytest.raises(ShapeError):
        a.permute((0, 0))
