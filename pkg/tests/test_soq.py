from fractions import Fraction

import numpy as np
import pytest

from qint.coeff import ONE, q
from qint.soq import build, perturb, rho_vector, verify_structure
from qint.tensor import compose2, identity2


def _matrix(t, q0):
    """Rank-4 operator as an N^2 x N^2 float matrix at q = q0."""
    N = t.dim
    m = np.zeros((N * N, N * N))
    for (i, j, k, l), v in t.evaluate(q0).items():
        m[(i - 1) * N + (j - 1), (k - 1) * N + (l - 1)] = float(v)
    return m


@pytest.mark.parametrize("N", [3, 4, 5])
def test_structure_identities(N):
    failed = [c for c in verify_structure(build(N)) if not c.passed]
    assert not failed, failed


@pytest.mark.parametrize("N", [3, 4, 5, 6])
def test_spectrum_numeric_oracle(N):
    # eigenvalues of R^ at q = 4 from numpy: q (mult N(N+1)/2 - 1), -1/q (N(N-1)/2), q^(1-N) (1)
    s = build(N)
    q0 = 4.0
    ev = np.sort(np.linalg.eigvals(_matrix(s.rhat, 4)).real)
    want = sorted([q0] * (N * (N + 1) // 2 - 1) + [-1 / q0] * (N * (N - 1) // 2) + [q0 ** (1 - N)])
    assert np.allclose(ev, want)


def test_multiplicities_n3():
    s = build(3)
    traces = [sum((v for (i, j, k, l), v in p.items() if (i, j) == (k, l)), start=0 * ONE)
              for p in (s.p_plus, s.p_minus, s.p_zero)]
    assert traces == [5, 3, 1]


@pytest.mark.parametrize("N", [3, 4])
def test_classical_limit_is_flip(N):
    s = build(N)
    at1 = s.rhat.evaluate(1)
    assert at1 == {(i, j, j, i): 1 for i in range(1, N + 1) for j in range(1, N + 1)}


@pytest.mark.parametrize("N", [3, 4, 5])
def test_projectors_resolve_identity(N):
    s = build(N)
    total = s.p_plus + s.p_minus + s.p_zero
    assert total == identity2(N)
    assert compose2(s.p_plus, s.p_minus).is_zero()


def test_metric_and_d_matrix():
    s = build(4)
    # g^{ij} = D^i_k g^{jk}
    for i in range(1, 5):
        for j in range(1, 5):
            rhs = sum((s.d_matrix[i, k] * s.g_upper[j, k] for k in range(1, 5)), start=0 * ONE)
            assert s.g_upper[i, j] == rhs
    # quantum dimension g_ij g^ij at q = 1 is N
    from qint.coeff import eval_numeric

    assert eval_numeric(s.qdim, 1) == 4


def test_rho():
    assert rho_vector(3) == (Fraction(1, 2), 0, Fraction(-1, 2))
    assert rho_vector(4) == (1, 0, 0, -1)


def test_small_n_rejected():
    with pytest.raises(ValueError):
        build(2)


def test_perturbation_detected():
    from qint.soq import _assemble

    s = perturb(_assemble(3), "rhat", (1, 2, 2, 1), q())
    failed = [c.name for c in verify_structure(s) if not c.passed]
    assert failed
