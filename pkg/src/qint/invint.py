"""Invariant tensors, spherical and Euclidean integrals, and their identity checks."""

from __future__ import annotations

import itertools
import os
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .coeff import ONE, ZERO, QScalar, analytic_at_one, eval_numeric, q
from .linalg import leading_minors, nullspace
from .ncalg import NCPoly, RewriteError, RewriteSystem, conjugate, laplacian_word, substitute
from .radial import Form, R0Poly, RadialFunctional, RadialProfile, radial_integrate
from .soq import CheckResult, SoqData
from .tensor import LabeledTensor, apply_pair, trace_pair

__all__ = [
    "InvariantTensor",
    "InvariantError",
    "invariant_tensor",
    "invariant_tensor_solve",
    "check_invariant_tensor",
    "sphere_integrate",
    "t_components",
    "check_theorem1",
    "euclid_integrate",
    "check_theorem2",
    "random_t_poly",
    "random_function",
    "max_degree",
    "RadialProfile",
    "RadialFunctional",
    "R0Poly",
    "radial_integrate",
]

DEFAULT_MAX_DEGREE = 8


class InvariantError(RuntimeError):
    pass


def max_degree() -> int:
    """Resource guard for tensor ranks and polynomial degrees (QINT_MAX_DEGREE)."""
    raw = os.environ.get("QINT_MAX_DEGREE")
    if raw is None:
        return DEFAULT_MAX_DEGREE
    try:
        val = int(raw)
    except ValueError:
        raise ValueError(f"QINT_MAX_DEGREE must be an integer, got {raw!r}") from None
    if val < 0:
        raise ValueError("QINT_MAX_DEGREE must be non-negative")
    return val


@dataclass
class InvariantTensor:
    n: int
    tensor: LabeledTensor
    lambda_n: QScalar

    def __getitem__(self, idx):
        return self.tensor[idx]


def _check_n(n):
    if not isinstance(n, int) or n < 0 or n % 2:
        raise ValueError("n must be a non-negative even integer")
    if n > max_degree():
        raise ValueError(f"rank {n} exceeds QINT_MAX_DEGREE={max_degree()}")


def _scalar_tensor(N):
    return LabeledTensor._trusted(0, N, {(): ONE})


def _fix_lambda(raw: LabeledTensor, lower: LabeledTensor, s: SoqData):
    """Scale ``raw`` so that its (1,2) g-trace equals ``lower``."""
    tr = trace_pair(s.g_lower, raw, 1)
    for idx, v in lower.entries.items():
        w = tr[idx]
        if not w:
            raise InvariantError("trace of the unnormalized tensor vanishes")
        return v / w
    raise InvariantError("lower tensor vanishes")


_cache = {}


def invariant_tensor(s: SoqData, rs: RewriteSystem, n: int) -> InvariantTensor:
    """I_n = lambda_n Delta^{n/2} x^{i1}...x^{in}, normalized by the trace chain."""
    _check_n(n)
    key = ("lap", id(s), id(rs), n)
    if key in _cache:
        return _cache[key]
    N = s.N
    if n == 0:
        out = InvariantTensor(0, _scalar_tensor(N), ONE)
        _cache[key] = out
        return out
    lower = invariant_tensor(s, rs, n - 2)
    a = rs.alpha
    lap_memo = {}

    def lap_power(w):
        hit = lap_memo.get(w)
        if hit is None:
            cur = {w: ONE}
            for _ in range(n // 2):
                acc = defaultdict(lambda: ZERO)
                for u, c in cur.items():
                    for v, d in laplacian_word(rs, u).items():
                        acc[v] = acc[v] + c * d
                cur = {v: c for v, c in acc.items() if c}
            if any(cur_w for cur_w in cur):
                raise InvariantError("Laplacian power left a non-constant remainder")
            hit = cur.get((), ZERO)
            lap_memo[w] = hit
        return hit

    ents = {}
    for idx in itertools.product(range(1, N + 1), repeat=n):
        word = tuple(a.code("x", i) for i in idx)
        val = ZERO
        for w, c in rs.normalize_word(word).items():
            val = val + c * lap_power(w)
        if val:
            ents[idx] = val
    raw = LabeledTensor._trusted(n, N, ents, ("u",) * n)
    lam = _fix_lambda(raw, lower.tensor, s)
    out = InvariantTensor(n, raw * lam, lam)
    failed = [c for c in check_invariant_tensor(s, out, lower) if not c.passed]
    if failed:
        raise InvariantError("; ".join(f"{c.name}: {c.witness}" for c in failed))
    _cache[key] = out
    return out


def _pairings(slots):
    if not slots:
        yield ()
        return
    a = slots[0]
    for k in range(1, len(slots)):
        rest = slots[1:k] + slots[k + 1 :]
        for p in _pairings(rest):
            yield ((a, slots[k]),) + p


def _adjacent_metric_product(s, n):
    """g^{i1 i2} g^{i3 i4} ... g^{i(n-1) in}."""
    ents = {(): ONE}
    for _ in range(n // 2):
        ents = {idx + ij: v * w for idx, v in ents.items() for ij, w in s.g_upper.items()}
    return LabeledTensor._trusted(n, s.N, ents, ("u",) * n)


def pairing_span(s: SoqData, n: int):
    """Span of the metric products with braided crossings.

    Starts from the adjacent product g g ... g and closes under the braid
    matrix on neighbouring slots.  At q = 1 this is the span of all pairing
    tensors; for q != 1 crossings must be braided to stay invariant.
    """
    seed = _adjacent_metric_product(s, n)
    basis, reduced = [], []
    todo = [seed]

    def reduce(vec):
        vec = dict(vec.entries)
        for piv, row in reduced:
            f = vec.get(piv)
            if f:
                for k, v in row.items():
                    nv = vec.get(k, ZERO) - f * v
                    if nv:
                        vec[k] = nv
                    else:
                        vec.pop(k, None)
        return vec

    while todo:
        t = todo.pop()
        vec = reduce(t)
        if not vec:
            continue
        piv = max(vec)
        inv = vec[piv].inverse()
        row = {k: v * inv for k, v in vec.items()}
        for j, (p2, r2) in enumerate(reduced):
            f = r2.get(piv)
            if f:
                for k, v in row.items():
                    nv = r2.get(k, ZERO) - f * v
                    if nv:
                        r2[k] = nv
                    else:
                        r2.pop(k, None)
        reduced.append((piv, row))
        basis.append(t)
        for l in range(1, n):
            todo.append(apply_pair(s.rhat, t, l))
    return basis


def invariant_tensor_solve(s: SoqData, n: int) -> InvariantTensor:
    """I_n from the g-pairing ansatz, the P- symmetry conditions and the trace chain."""
    _check_n(n)
    key = ("solve", id(s), n)
    if key in _cache:
        return _cache[key]
    N = s.N
    if n == 0:
        out = InvariantTensor(0, _scalar_tensor(N), ONE)
        _cache[key] = out
        return out
    lower = invariant_tensor_solve(s, n - 2)
    basis = pairing_span(s, n)
    rows = defaultdict(dict)
    for m, t in enumerate(basis):
        for l in range(1, n):
            for idx, v in apply_pair(s.p_minus, t, l).items():
                rows[(l, idx)][m] = v
    null = nullspace(list(rows.values()), list(range(len(basis))))
    if len(null) != 1:
        raise InvariantError(f"pairing ansatz for n={n} has a {len(null)}-dimensional solution space")
    ents = defaultdict(lambda: ZERO)
    for m, c in null[0].items():
        for idx, v in basis[m].items():
            ents[idx] = ents[idx] + c * v
    raw = LabeledTensor._trusted(n, N, {k: v for k, v in ents.items() if v}, ("u",) * n)
    lam = _fix_lambda(raw, lower.tensor, s)
    out = InvariantTensor(n, raw * lam, lam)
    failed = [c for c in check_invariant_tensor(s, out, lower) if not c.passed]
    if failed:
        raise InvariantError("; ".join(f"{c.name}: {c.witness}" for c in failed))
    _cache[key] = out
    return out


def check_invariant_tensor(s: SoqData, I: InvariantTensor, lower: InvariantTensor | None = None):
    """Symmetry, trace chain, analyticity at q = 1 and the cyclic D-identity."""
    n, T = I.n, I.tensor
    out = []
    for l in range(1, n):
        bad = apply_pair(s.p_minus, T, l)
        out.append(CheckResult(f"P- I = 0 (slots {l},{l + 1})", bad.is_zero(),
                               "" if bad.is_zero() else f"entry {next(iter(bad.entries))}"))
    if lower is not None and n >= 2:
        for l in range(1, n):
            tr = trace_pair(s.g_lower, T, l)
            ok = tr == lower.tensor
            out.append(CheckResult(f"g-trace I_{n} = I_{n - 2} (slots {l},{l + 1})", ok, "" if ok else "mismatch"))
    poles = [idx for idx, v in T.items() if not analytic_at_one(v)]
    out.append(CheckResult(f"I_{n} analytic at q=1", not poles, f"pole at {poles[0]}" if poles else ""))
    bad = None
    D = s.d_matrix
    for idx in itertools.product(range(1, s.N + 1), repeat=n):
        if n == 0:
            break
        rhs = D[idx[0], idx[0]] * T[idx[1:] + idx[:1]]
        if T[idx] != rhs:
            bad = f"entry {idx}: {T[idx]} != {rhs}"
            break
    out.append(CheckResult(f"I_{n} cyclic", bad is None, bad or ""))
    return out


def classical_moment(N: int, n: int):
    """q = 1 moments <t^{i1}...t^{in}> in the antidiagonal metric, as Fractions.

    Built from pairings of the q = 1 inverse metric (antidiagonal ones) and
    divided by N(N+2)...(N+n-2).
    """
    norm = Fraction(1)
    for k in range(0, n, 2):
        norm *= N + k
    out = {}
    for idx in itertools.product(range(1, N + 1), repeat=n):
        cnt = 0
        for p in _pairings(tuple(range(n))):
            if all(idx[a] + idx[b] == N + 1 for a, b in p):
                cnt += 1
        if cnt:
            out[idx] = Fraction(cnt) / norm
    return out


# ---------------------------------------------------------------------------
# sphere


def t_components(p: NCPoly, rs: RewriteSystem):
    """Normalize a function and split it as {x-word: RadialProfile}.

    Each normal word r^k x^J becomes t^J times r^(k+|J|).
    """
    a = rs.alpha
    kinds = p.kinds()
    if kinds & {"dx", "del"}:
        raise ValueError("expected a function of x and r")
    out = {}
    for w, c in rs.normalize(p).terms.items():
        k = sum(1 if a.kind(l)[0] == "r" else -1 for l in w if a.kind(l)[0] in ("r", "rinv"))
        J = tuple(l for l in w if a.kind(l)[0] == "x")
        h = RadialProfile.power(k + len(J), c)
        out[J] = out[J] + h if J in out else h
    return {J: h for J, h in out.items() if not h.is_zero()}


def _moment(s, rs, J, route="lap"):
    """<t^J>_t from the invariant tensor of the rewrite system's own structure data."""
    n = len(J)
    if n % 2:
        return ZERO
    s = rs.s
    I = invariant_tensor(s, rs, n) if route == "lap" else invariant_tensor_solve(s, n)
    a = rs.alpha
    return I.tensor[tuple(a.kind(c)[1] for c in J)]


def sphere_integrate(p: NCPoly, s: SoqData, rs: RewriteSystem) -> QScalar:
    """<p>_t for a polynomial in t^i = x^i r^-1."""
    total = ZERO
    for J, h in t_components(p, rs).items():
        if h.loc or set(h.glob) - {0}:
            raise ValueError("input is not a polynomial in t (unbalanced r-degree)")
        total = total + h.glob.get(0, ZERO) * _moment(s, rs, J)
    return total


def random_t_poly(N: int, degree: int, rng: random.Random, terms: int = 4, lo: int = 0) -> NCPoly:
    """Random polynomial in t^i with small rational coefficients."""
    out = NCPoly(N)
    for _ in range(terms):
        d = rng.randint(lo, degree)
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        mono = NCPoly.const(N, c)
        for _ in range(d):
            mono = mono * NCPoly.t(N, rng.randint(1, N))
        out = out + mono
    return out


def _eval_matrix(m, q0):
    return [[eval_numeric(v, q0) for v in row] for row in m]


def gram_basis(N: int, rs: RewriteSystem, degree: int = 2):
    """Normal t-monomials of degree <= ``degree`` (a basis of that filtration)."""
    a = rs.alpha
    xs = [a.code("x", i) for i in range(1, N + 1)]
    basis = []
    for d in range(degree + 1):
        for J in itertools.combinations_with_replacement(xs, d):
            if rs.is_normal(J):
                basis.append(NCPoly._trusted(N, {J + (a.RINV,) * d: ONE}))
    return basis


def check_theorem1(s: SoqData, rs: RewriteSystem, samples: int = 20, degree: int = 4, seed: int = 0,
                   q_values=(Fraction(4, 5), 1, Fraction(5, 4)), gram_degree: int = 2):
    """Reality, cyclicity and positivity of the spherical integral."""
    rng = random.Random(seed)
    N = s.N
    out = []
    real_bad = cyc_bad = None
    for k in range(samples):
        f = random_t_poly(N, degree, rng)
        g = random_t_poly(N, degree, rng)
        lhs = sphere_integrate(conjugate(f, s), s, rs)
        rhs = sphere_integrate(f, s, rs)
        if lhs != rhs and real_bad is None:
            real_bad = f"sample {k}: <conj f> = {lhs}, <f> = {rhs}"
        c1 = sphere_integrate(f * g, s, rs)
        c2 = sphere_integrate(g * substitute(f, s, twist=True), s, rs)
        if c1 != c2 and cyc_bad is None:
            cyc_bad = f"sample {k}: <f g> = {c1}, <g f(Dt)> = {c2}"
    out.append(CheckResult("sphere reality", real_bad is None, real_bad or ""))
    out.append(CheckResult("sphere cyclic", cyc_bad is None, cyc_bad or ""))

    basis = gram_basis(N, rs, gram_degree)
    gram = [[sphere_integrate(conjugate(u, s) * v, s, rs) for v in basis] for u in basis]
    sym = all(gram[i][j] == gram[j][i] for i in range(len(basis)) for j in range(i))
    out.append(CheckResult("Gram symmetric", sym, "" if sym else "G != G^T"))
    minors = leading_minors(gram)
    for q0 in q_values:
        vals = [eval_numeric(m, q0) for m in minors]
        bad = [i for i, v in enumerate(vals) if v < 0]
        out.append(CheckResult(
            f"Gram minors >= 0 at q={q0}", not bad,
            "" if not bad else f"minor {bad[0] + 1} = {vals[bad[0]]}",
        ))
    return out


# ---------------------------------------------------------------------------
# Euclidean integral


def _as_function(f, rs):
    """Accept a Form of degree 0, an NCPoly, or a list of (NCPoly, RadialProfile)."""
    if isinstance(f, Form):
        if any(I for (I, _) in f.terms):
            raise ValueError("expected a function (degree-0 form)")
        return f
    if isinstance(f, NCPoly):
        return Form.from_poly(f, rs)
    out = Form(rs)
    for item in f:
        try:
            p, h = item
        except (TypeError, ValueError):
            raise ValueError("malformed decomposition: expected (polynomial, profile) pairs") from None
        out = out + Form.from_poly(p, rs, h)
    return out


def sphere_average(f, s: SoqData, rs: RewriteSystem) -> RadialProfile:
    """<f(t, r)>_t as a profile in r."""
    fn = _as_function(f, rs)
    out = RadialProfile()
    for (_, J), h in fn.terms.items():
        m = _moment(s, rs, J)
        if m:
            out = out + h * m
    return out


def euclid_integrate(f, s: SoqData, rs: RewriteSystem, F: RadialFunctional | None = None) -> R0Poly:
    """<f>_x = << f >_t(r) r^(N-1) >_r with the radial functional F."""
    F = F or RadialFunctional.jackson_delta()
    avg = sphere_average(f, s, rs)
    return F.integrate_dr(avg.times_power(s.N - 1))


def scale_function(f: Form, k: int = 1) -> Form:
    """f(x) -> f(q^k x); t is unchanged and h(r) -> h(q^k r)."""
    return f.map_profiles(lambda h: h.shift(k))


def twist_function(f: Form, s: SoqData) -> Form:
    """f(x) -> f(Dx); r is fixed."""
    rs = f.rs
    out = {}
    for (I, J), h in f.terms.items():
        c = ONE
        for code in I + J:
            i = rs.alpha.kind(code)[1]
            c = c * s.d_matrix[i, i]
        out[(I, J)] = h * c
    return Form(rs, out)


def random_profile(rng: random.Random, width: int = 3, compact=True) -> RadialProfile:
    support = {rng.randint(-width, width): Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3))
               for _ in range(rng.randint(1, 3))}
    h = RadialProfile.lattice(support, m=rng.randint(-2, 2))
    if not compact:
        h = h + RadialProfile.power(rng.randint(-2, 2), rng.randint(1, 3))
    return h


def random_function(rs: RewriteSystem, rng: random.Random, degree: int = 3, terms: int = 2) -> Form:
    out = Form(rs)
    for _ in range(terms):
        out = out + Form.from_poly(random_t_poly(rs.N, degree, rng, terms=2), rs, random_profile(rng))
    return out


def check_theorem2(s: SoqData, rs: RewriteSystem, samples: int = 10, degree: int = 3, seed: int = 0):
    """Scaling, cyclicity and reality of the Euclidean integral (delta weight)."""
    rng = random.Random(seed)
    N = s.N
    Q = q()
    F = RadialFunctional.jackson_delta()
    out = []
    sc_bad = cyc_bad = real_bad = rad_bad = None
    for k in range(samples):
        f = random_function(rs, rng, degree)
        g = random_function(rs, rng, degree)
        lhs = euclid_integrate(scale_function(f), s, rs, F)
        rhs = euclid_integrate(f, s, rs, F) * Q ** (-N)
        if lhs != rhs and sc_bad is None:
            sc_bad = f"sample {k}: {lhs} != {rhs}"
        c1 = euclid_integrate(f * g, s, rs, F)
        c2 = euclid_integrate(g * twist_function(f, s), s, rs, F)
        if c1 != c2 and cyc_bad is None:
            cyc_bad = f"sample {k}: <f g> = {c1}, <g f(Dx)> = {c2}"
        fc = _conjugate_function(f, s)
        r1, r2 = euclid_integrate(fc, s, rs, F), euclid_integrate(f, s, rs, F)
        if r1 != r2 and real_bad is None:
            real_bad = f"sample {k}: {r1} != {r2}"
        h = random_profile(rng)
        a1 = radial_integrate(h.shift(1), F)
        a2 = radial_integrate(h, F) * Q ** -1
        if a1 != a2 and rad_bad is None:
            rad_bad = f"sample {k}: {a1} != {a2}"
    out.append(CheckResult("radial scaling", rad_bad is None, rad_bad or ""))
    out.append(CheckResult("euclid scaling", sc_bad is None, sc_bad or ""))
    out.append(CheckResult("euclid cyclic", cyc_bad is None, cyc_bad or ""))
    out.append(CheckResult("euclid reality", real_bad is None, real_bad or ""))
    return out


def _conjugate_function(f: Form, s: SoqData) -> Form:
    """Conjugate of sum t^J h(r); profiles have rational coefficients (real)."""
    rs = f.rs
    out = Form(rs)
    for (I, J), h in f.terms.items():
        p = NCPoly._trusted(rs.N, {J + (rs.alpha.RINV,) * len(J): ONE})
        out = out + Form.from_poly(conjugate(p, s), rs, h)
    return out
