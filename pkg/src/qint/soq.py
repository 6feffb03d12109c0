"""SO_q(N) structure data: braid matrix, projectors, metric and D-matrix.

The braid matrix is the flip composed with the orthogonal-series R-matrix,
written in the weight basis with conjugate index i' = N+1-i.  Every identity
that pins the conventions is re-checked when the data is built.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .coeff import ONE, ZERO, QScalar, eval_numeric, q
from .linalg import det
from .tensor import (
    LabeledTensor,
    add,
    apply_pair,
    compose2,
    contract,
    delta,
    first_difference,
    flip2,
    identity2,
    scale,
)

__all__ = [
    "SoqData",
    "StructureError",
    "CheckResult",
    "build",
    "rho_vector",
    "rhat_inverse",
    "verify_structure",
    "perturb",
    "p0_normalization",
]


class StructureError(RuntimeError):
    """The constructed structure data violates a defining identity."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str = ""

    def to_json(self):
        out = {"name": self.name, "passed": self.passed}
        if self.witness:
            out["witness"] = self.witness
        return out


@dataclass(frozen=True, eq=False)
class SoqData:
    N: int
    rho: tuple
    rhat: LabeledTensor
    p_plus: LabeledTensor
    p_minus: LabeledTensor
    p_zero: LabeledTensor
    g_lower: LabeledTensor
    g_upper: LabeledTensor
    d_matrix: LabeledTensor
    qdim: QScalar
    tag: str = field(default="")

    def conj(self, i: int) -> int:
        return self.N + 1 - i

    @property
    def eigenvalues(self):
        """(P+, P-, P0) eigenvalues of the braid matrix."""
        Q = q()
        return Q, -(Q ** -1), Q ** (1 - self.N)


def rho_vector(N: int):
    """Exponent vector (N/2-1, ..., 0 or 1/2, ..., 1-N/2) with rho_{i'} = -rho_i."""
    out = []
    for i in range(1, N + 1):
        ip = N + 1 - i
        if i < ip:
            out.append(Fraction(N, 2) - i)
        elif i == ip:
            out.append(Fraction(0))
        else:
            out.append(-(Fraction(N, 2) - ip))
    return tuple(out)


def p0_normalization(N: int) -> QScalar:
    Q = q()
    return (Q**2 - 1) / ((Q**N - 1) * (Q ** (2 - N) + 1))


def _r_matrix(N, rho):
    """R^{ik}_{jl} for the orthogonal series (before the flip)."""
    Q = q()
    lam = Q - Q ** -1
    ents = {}

    def put(i, j, k, l, v):
        key = (i, k, j, l)
        w = ents.get(key, ZERO) + v
        if w:
            ents[key] = w
        else:
            ents.pop(key, None)

    for i in range(1, N + 1):
        ic = N + 1 - i
        for j in range(1, N + 1):
            e = (1 if i == j else 0) - (1 if j == ic else 0)
            put(i, i, j, j, Q**e)
            if i > j:
                jc = N + 1 - j
                put(i, j, j, i, lam)
                put(i, j, ic, jc, -lam * QScalar.monomial(rho[i - 1] - rho[j - 1]))
    return LabeledTensor(4, N, ents, ("u", "u", "l", "l"))


def _lagrange(rhat, eigs, k):
    N = rhat.dim
    one = identity2(N)
    out = one
    denom = ONE
    for m, lam in enumerate(eigs):
        if m == k:
            continue
        out = compose2(out, add(rhat, scale(one, -lam)))
        denom = denom * (eigs[k] - lam)
    out = scale(out, denom.inverse())
    out.variance = ("u", "u", "l", "l")
    return out


def _assemble(N: int) -> SoqData:
    rho = rho_vector(N)
    R = _r_matrix(N, rho)
    rhat = contract(flip2(N), (3, 4), R, (1, 2))
    rhat.variance = ("u", "u", "l", "l")
    Q = q()
    eigs = (Q, -(Q ** -1), Q ** (1 - N))
    p_plus, p_minus, p_zero = (_lagrange(rhat, eigs, k) for k in range(3))
    g_ents = {(i, N + 1 - i): QScalar.monomial(-rho[i - 1]) for i in range(1, N + 1)}
    g_lower = LabeledTensor(2, N, g_ents, ("l", "l"))
    g_upper = LabeledTensor(2, N, g_ents, ("u", "u"))
    d_matrix = LabeledTensor(
        2, N, {(i, i): QScalar.monomial(-2 * rho[i - 1]) for i in range(1, N + 1)}, ("u", "l")
    )
    qdim = contract(g_lower, (1, 2), g_upper, (1, 2)).scalar()
    return SoqData(N, rho, rhat, p_plus, p_minus, p_zero, g_lower, g_upper, d_matrix, qdim)


@lru_cache(maxsize=None)
def build(N: int) -> SoqData:
    """Structure data for SO_q(N), verified exactly before it is returned."""
    if not isinstance(N, int) or N < 3:
        raise ValueError("N must be an integer >= 3 (N = 1, 2 are undeformed)")
    s = _assemble(N)
    failed = [c for c in verify_structure(s) if not c.passed]
    if failed:
        raise StructureError(
            "structure identities failed: " + "; ".join(f"{c.name} ({c.witness})" for c in failed)
        )
    return s


@lru_cache(maxsize=None)
def _rhat_inverse_cached(N: int) -> LabeledTensor:
    return _rhat_inverse_from(build(N))


def _rhat_inverse_from(s: SoqData) -> LabeledTensor:
    Q = q()
    out = add(
        add(scale(s.p_plus, Q ** -1), scale(s.p_minus, -Q)),
        scale(s.p_zero, Q ** (s.N - 1)),
    )
    out.variance = ("u", "u", "l", "l")
    return out


def rhat_inverse(s: SoqData) -> LabeledTensor:
    """Inverse braid matrix q^-1 P+ - q P- + q^(N-1) P0."""
    if not s.tag and s is build(s.N):
        return _rhat_inverse_cached(s.N)
    return _rhat_inverse_from(s)


def perturb(s: SoqData, which: str, idx, delta_value) -> SoqData:
    """Copy of ``s`` with one entry of tensor ``which`` shifted (negative controls)."""
    t = getattr(s, which)
    ents = dict(t.entries)
    new = ents.get(tuple(idx), ZERO) + delta_value
    if new:
        ents[tuple(idx)] = new
    else:
        ents.pop(tuple(idx), None)
    bad = LabeledTensor(t.rank, t.dim, ents, t.variance)
    return dataclasses.replace(s, **{which: bad, "tag": f"perturbed:{which}{tuple(idx)}"})


def _witness(a, b):
    d = first_difference(a, b)
    if d is None:
        return ""
    idx, x, y = d
    return f"entry {idx}: {x} != {y}"


def _braid_sides(s):
    N = s.N
    ident = {}
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            for c in range(1, N + 1):
                ident[(a, b, c, a, b, c)] = ONE
    one3 = LabeledTensor._trusted(6, N, ident)
    r = s.rhat
    lhs = apply_pair(r, apply_pair(r, apply_pair(r, one3, 1), 2), 1)
    rhs = apply_pair(r, apply_pair(r, apply_pair(r, one3, 2), 1), 2)
    return lhs, rhs


def verify_structure(s: SoqData):
    """Run the identity suite; return a list of CheckResult in fixed order."""
    N = s.N
    Q = q()
    one = identity2(N)
    out = []

    def check(name, a, b):
        ok = a == b
        out.append(CheckResult(name, ok, "" if ok else _witness(a, b)))

    lam_p, lam_m, lam_0 = s.eigenvalues
    decomposed = add(add(scale(s.p_plus, lam_p), scale(s.p_minus, lam_m)), scale(s.p_zero, lam_0))
    check("projector decomposition", s.rhat, decomposed)
    check("projector completeness", add(add(s.p_plus, s.p_minus), s.p_zero), one)
    projs = (("P+", s.p_plus), ("P-", s.p_minus), ("P0", s.p_zero))
    for name, p in projs:
        check(f"{name} idempotent", compose2(p, p), p)
    zero4 = LabeledTensor._trusted(4, N, {})
    for a, (na, pa) in enumerate(projs):
        for b, (nb, pb) in enumerate(projs):
            if a != b:
                check(f"{na}{nb} = 0", compose2(pa, pb), zero4)

    c = p0_normalization(N)
    gg = {}
    for (i, j), v in s.g_upper.items():
        for (k, l), w in s.g_lower.items():
            gg[(i, j, k, l)] = c * v * w
    check("P0 display", s.p_zero, LabeledTensor(4, N, gg))

    check("g g = delta", contract(s.g_lower, 2, s.g_upper, 1), delta(N))
    check("g upper = g lower", LabeledTensor(2, N, s.g_upper.entries), LabeledTensor(2, N, s.g_lower.entries))
    check("D = g g", contract(s.g_upper, 2, s.g_lower, 2), LabeledTensor(2, N, s.d_matrix.entries))

    dmat = [[s.d_matrix[i, j] for j in range(1, N + 1)] for i in range(1, N + 1)]
    detd = det(dmat)
    out.append(CheckResult("det D = 1", detd == ONE, "" if detd == ONE else f"det D = {detd}"))
    diag_ok = all(i == j and v.is_laurent() and len(v.laurent_terms()) == 1 for (i, j), v in s.d_matrix.items())
    out.append(CheckResult("D diagonal powers of q", diag_ok, "" if diag_ok else "D has off-diagonal or non-monomial entry"))

    trace_d = sum((s.d_matrix[i, i] for i in range(1, N + 1)), ZERO)
    ok = trace_d == s.qdim and s.qdim * c == ONE
    out.append(CheckResult("quantum dimension", ok, "" if ok else f"tr D = {trace_d}, g.g = {s.qdim}, 1/c = {1 / c}"))

    lhs, rhs = _braid_sides(s)
    check("braid relation", lhs, rhs)

    sym = None
    for (i, j, k, l), v in s.rhat.items():
        if s.rhat[k, l, i, j] != v:
            sym = f"entry {(i, j, k, l)}: {v} != {s.rhat[k, l, i, j]}"
            break
    out.append(CheckResult("R symmetric", sym is None, sym or ""))
    real_bad = None
    for idx, v in s.rhat.items():
        # a rational function with rational coefficients is real for real q > 0
        if not isinstance(eval_numeric(v, 4), Fraction):
            real_bad = f"entry {idx}"
    out.append(CheckResult("R real", real_bad is None, real_bad or ""))

    mults = (N * (N + 1) // 2 - 1, N * (N - 1) // 2, 1)
    for (name, p), m in zip(projs, mults):
        tr = sum((v for (i, j, k, l), v in p.items() if (i, j) == (k, l)), ZERO)
        out.append(CheckResult(f"rank {name} = {m}", tr == m, "" if tr == m else f"trace = {tr}"))

    flip_ok = {k: eval_numeric(v, 1) for k, v in s.rhat.items()}
    flip_ok = {k: v for k, v in flip_ok.items() if v}
    flip = {k: 1 for k in flip2(N).entries}
    out.append(CheckResult("R at q=1 is the flip", flip_ok == flip, "" if flip_ok == flip else "mismatch"))
    g1 = {k: eval_numeric(v, 1) for k, v in s.g_lower.items()}
    anti = {(i, N + 1 - i): 1 for i in range(1, N + 1)}
    out.append(CheckResult("g at q=1 antidiagonal", g1 == anti, "" if g1 == anti else str(g1)))

    rinv = _rhat_inverse_from(s)
    check("R Rinv = 1", compose2(s.rhat, rinv), one)
    return out
