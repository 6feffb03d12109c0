"""Exterior calculus through the one-form omega, the epsilon tensor, and integrals of forms.

Integrals over the sphere of radius r are returned as "records": the
profile G(r) with the sphere integral of an N-form equal to omega G(r),
where G(r) = r^N <f>_t(r).  For an (N-1)-form alpha the sphere integral is
the record of omega alpha with the explicit omega removed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .coeff import ONE, ZERO, QScalar, eval_numeric, q
from .invint import _moment, euclid_integrate, random_profile, random_t_poly
from .ncalg import NCPoly, RewriteSystem
from .radial import Form, R0Poly, RadialFunctional, RadialProfile
from .soq import CheckResult, SoqData
from .tensor import LabeledTensor, apply_pair, trace_pair

__all__ = [
    "Form",
    "EpsilonTensor",
    "FormError",
    "epsilon",
    "check_epsilon",
    "omega",
    "exterior_d",
    "top_form",
    "sphere_record",
    "integrate_form_over_sphere",
    "integrate_form_over_space",
    "integrate_annulus",
    "stokes_annulus",
    "stokes_space",
    "stokes_sphere",
    "scale_form",
    "twist_form",
    "check_forms",
    "check_cyclic_forms",
    "check_stokes",
    "random_form",
]


class FormError(ValueError):
    pass


@dataclass
class EpsilonTensor:
    tensor: LabeledTensor
    top_word: tuple
    top_coeff: QScalar

    def __getitem__(self, idx):
        return self.tensor[idx]


def _dx_word(rs, idx):
    return tuple(rs.alpha.code("dx", i) for i in idx)


def _top(rs):
    """Normal form c0 * w0 of dx^1 ... dx^N."""
    key = ("top",)
    hit = rs._memo.get(key)
    if hit is None:
        nf = rs.normalize_word(_dx_word(rs, range(1, rs.N + 1)))
        if len(nf) != 1:
            raise FormError(f"dx^1...dx^N does not normalize to a single word: {nf}")
        (w0, c0), = nf.items()
        hit = (w0, c0)
        rs._memo[key] = hit
    return hit


def epsilon(s: SoqData, rs: RewriteSystem, check=True) -> EpsilonTensor:
    """dx^{i1}...dx^{iN} = eps^{i1...iN} dx^1...dx^N."""
    N = s.N
    w0, c0 = _top(rs)
    ents = {}
    for idx in itertools.product(range(1, N + 1), repeat=N):
        nf = rs.normalize_word(_dx_word(rs, idx))
        extra = set(nf) - {w0}
        if extra:
            raise FormError(f"dx word {idx} does not reduce to a multiple of the top word")
        if w0 in nf:
            ents[idx] = nf[w0] / c0
    eps = EpsilonTensor(LabeledTensor._trusted(N, N, ents, ("u",) * N), w0, c0)
    if check:
        failed = [c for c in check_epsilon(s, eps) if not c.passed]
        if failed:
            raise FormError("; ".join(f"{c.name}: {c.witness}" for c in failed))
    return eps


def _perm_sign(p):
    sign, p = 1, list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def check_epsilon(s: SoqData, eps: EpsilonTensor):
    N = s.N
    T = eps.tensor
    out = []
    top = T[tuple(range(1, N + 1))]
    out.append(CheckResult("eps^{1..N} = 1", top == ONE, "" if top == ONE else str(top)))
    bad = None
    sign = (-1) ** (N - 1)
    for idx in itertools.product(range(1, N + 1), repeat=N):
        rhs = sign * s.d_matrix[idx[0], idx[0]] * T[idx[1:] + idx[:1]]
        if T[idx] != rhs:
            bad = f"entry {idx}: {T[idx]} != {rhs}"
            break
    out.append(CheckResult("eps cyclic", bad is None, bad or ""))
    for l in range(1, N):
        p = apply_pair(s.p_plus, T, l)
        out.append(CheckResult(f"P+ eps = 0 (slots {l},{l + 1})", p.is_zero(), "" if p.is_zero() else "nonzero"))
        g = trace_pair(s.g_lower, T, l)
        out.append(CheckResult(f"g eps = 0 (slots {l},{l + 1})", g.is_zero(), "" if g.is_zero() else "nonzero"))
    classical = {}
    for perm in itertools.permutations(range(N)):
        classical[tuple(i + 1 for i in perm)] = _perm_sign(perm)
    at_one = T.evaluate(1)
    ok = at_one == classical
    out.append(CheckResult("eps at q=1 is Levi-Civita", ok, "" if ok else "mismatch"))
    return out


# ---------------------------------------------------------------------------
# omega and d


def omega(rs: RewriteSystem) -> Form:
    """omega = q^2/((q+1) r^2) d(r^2), with d(r^2) = g_ij (dx^i x^j + x^i dx^j)."""
    hit = rs._memo.get(("omega",))
    if hit is not None:
        return hit
    N = rs.N
    s = rs.s
    Q = q()
    dr2 = NCPoly(N)
    for (i, j), g in s.g_lower.items():
        dr2 = dr2 + (NCPoly.dx(N, i) * NCPoly.x(N, j) + NCPoly.x(N, i) * NCPoly.dx(N, j)) * g
    p = NCPoly.r(N, -2) * dr2 * (Q**2 / (Q + 1))
    w = Form.from_poly(p, rs)
    rs._memo[("omega",)] = w
    return w


def _homogeneous_parts(a: Form):
    parts = {}
    for key, h in a.terms.items():
        parts.setdefault(len(key[0]), {})[key] = h
    return {k: Form(a.rs, v) for k, v in parts.items()}


def exterior_d(a: Form) -> Form:
    """d a = (omega a - (-1)^deg a omega) / (1 - q), degree by degree."""
    rs = a.rs
    w = omega(rs)
    inv = (1 - q()).inverse()
    out = Form(rs)
    for k, part in _homogeneous_parts(a).items():
        c = w * part - (part * w).scale((-1) ** k)
        out = out + c.scale(inv)
    return out


def top_form(rs: RewriteSystem, f=None, profile=None) -> Form:
    """d^N x f with f a function polynomial times a profile."""
    N = rs.N
    dn = NCPoly.const(N, 1)
    for i in range(1, N + 1):
        dn = dn * NCPoly.dx(N, i)
    if f is None:
        f = NCPoly.const(N, 1)
    return Form.from_poly(dn * f, rs, profile)


# ---------------------------------------------------------------------------
# integration


def _top_coefficient(a: Form):
    """Split an N-form as d^N x f; return {x-word: profile} for f."""
    rs = a.rs
    N = rs.N
    w0, c0 = _top(rs)
    inv = c0.inverse()
    out = {}
    for (I, J), h in a.terms.items():
        if len(I) != N:
            raise FormError(f"expected an {N}-form, found a term of degree {len(I)}")
        if I != w0:
            raise FormError("top-degree term is not a multiple of the top word")
        out[J] = h * inv
    return out


def sphere_record(a: Form) -> RadialProfile:
    """G(r) with the integral of the N-form a over r S^{N-1} equal to omega G(r)."""
    rs = a.rs
    s = rs.s
    avg = RadialProfile()
    for J, h in _top_coefficient(a).items():
        m = _moment(s, rs, J)
        if m:
            avg = avg + h * m
    return avg.times_power(rs.N)


def integrate_form_over_sphere(a: Form) -> RadialProfile:
    """Record of the sphere integral for N-forms; (N-1)-forms go through omega a."""
    N = a.rs.N
    if a.is_zero():
        return RadialProfile()
    degs = a.degrees()
    if degs == [N]:
        return sphere_record(a)
    if degs == [N - 1]:
        return sphere_record(omega(a.rs) * a)
    raise FormError(f"sphere integrals need degree {N} or {N - 1}, got {degs}")


def integrate_form_over_space(a: Form, F: RadialFunctional | None = None) -> R0Poly:
    """Integral over space: d^N x f -> <f>_x."""
    if a.is_zero():
        return R0Poly()
    fn = Form(a.rs, {((), J): h for J, h in _top_coefficient(a).items()})
    return euclid_integrate(fn, a.rs.s, a.rs, F)


def _window(k, l):
    if not (isinstance(k, int) and isinstance(l, int)) or k >= l:
        raise FormError("annulus needs integers k < l")


def integrate_annulus(a: Form, k: int, l: int) -> R0Poly:
    """(q-1) sum_{n=k}^{l-1} G(q^n r0) for the N-form a."""
    _window(k, l)
    G = integrate_form_over_sphere(a)
    return RadialFunctional.finite_window(k, l).integrate(G)


def stokes_annulus(alpha: Form, k: int, l: int) -> CheckResult:
    """Integral of d alpha over the annulus equals the difference of boundary sphere integrals."""
    _window(k, l)
    N = alpha.rs.N
    if alpha.degrees() not in ([N - 1], []):
        raise FormError(f"stokes_annulus needs an {N - 1}-form")
    lhs = integrate_annulus(exterior_d(alpha), k, l)
    S = integrate_form_over_sphere(alpha)
    rhs = S.value_at(l) - S.value_at(k)
    ok = lhs == rhs
    return CheckResult(f"annulus Stokes [{k},{l})", ok, "" if ok else f"{lhs} != {rhs}")


def stokes_space(alpha: Form, F: RadialFunctional | None = None) -> CheckResult:
    val = integrate_form_over_space(exterior_d(alpha), F)
    return CheckResult("space Stokes", val.is_zero(), "" if val.is_zero() else f"integral = {val}")


def _in_sphere_sector(alpha: Form):
    """Forms built from dx^i r^-1 and t^i carry the profile r^-(#dx) only."""
    for (I, J), h in alpha.terms.items():
        if h != RadialProfile.power(-len(I), h.glob.get(-len(I), ZERO)) or h.loc:
            return False
    return True


def stokes_sphere(alpha: Form) -> CheckResult:
    N = alpha.rs.N
    if alpha.is_zero():
        return CheckResult("sphere Stokes", True)
    if alpha.degrees() != [N - 2] or not _in_sphere_sector(alpha):
        raise FormError(f"stokes_sphere needs an {N - 2}-form in dx^i r^-1 and t^i")
    G = integrate_form_over_sphere(exterior_d(alpha))
    return CheckResult("sphere Stokes", G.is_zero(), "" if G.is_zero() else f"record = {G}")


# ---------------------------------------------------------------------------
# substitutions


def scale_form(a: Form, k: int = 1) -> Form:
    """a(x) -> a(q^k x): dx^i -> q^k dx^i, t fixed, h(r) -> h(q^k r)."""
    Q = q()
    out = {}
    for (I, J), h in a.terms.items():
        out[(I, J)] = h.shift(k) * Q ** (k * len(I))
    return Form(a.rs, out)


def twist_form(a: Form, power: int = 0) -> Form:
    """a(x) -> a(q^power D x) with dx scaled alike and r -> q^power r."""
    rs = a.rs
    s = rs.s
    Q = q()
    out = {}
    for (I, J), h in a.terms.items():
        c = Q ** (power * len(I))
        for code in I + J:
            i = rs.alpha.kind(code)[1]
            c = c * s.d_matrix[i, i]
        out[(I, J)] = h.shift(power) * c
    return Form(rs, out)


# ---------------------------------------------------------------------------
# random samples and suites


def random_form(rs: RewriteSystem, degree: int, rng: random.Random, tdeg: int = 2, terms: int = 2,
                profile="compact", sphere=False) -> Form:
    """Random form of the given degree.

    profile: "compact" (lattice supported), "power" (global r-powers) or
    "mixed".  sphere=True builds from dx^i r^-1 and t^i only.
    """
    N = rs.N
    out = Form(rs)
    for _ in range(terms):
        p = NCPoly.const(N, 1)
        for i in rng.sample(range(1, N + 1), degree):
            p = p * NCPoly.dx(N, i)
            if sphere:
                p = p * NCPoly.r(N, -1)
        p = p * random_t_poly(N, tdeg, rng, terms=2)
        if sphere:
            h = RadialProfile.one()
        elif profile == "compact":
            h = random_profile(rng)
        elif profile == "power":
            h = RadialProfile.power(rng.randint(-3, 3), rng.randint(1, 3))
        else:
            h = random_profile(rng, compact=False)
        out = out + Form.from_poly(p, rs, h)
    return out


def check_forms(s: SoqData, rs: RewriteSystem, samples: int = 5, seed: int = 0):
    """omega identities, d(x^i) = dx^i, d^2 = 0 and the sphere scaling law."""
    rng = random.Random(seed)
    N = s.N
    Q = q()
    w = omega(rs)
    out = []
    ww = w * w
    out.append(CheckResult("omega^2 = 0", ww.is_zero(), "" if ww.is_zero() else str(ww)))
    dw = exterior_d(w)
    out.append(CheckResult("d omega = 0", dw.is_zero(), "" if dw.is_zero() else str(dw)))
    bad = None
    for i in range(1, N + 1):
        xi = Form.from_poly(NCPoly.x(N, i), rs)
        lhs = w * xi - xi * w
        rhs = Form.from_poly(NCPoly.dx(N, i), rs).scale(1 - Q)
        if lhs != rhs:
            bad = f"i={i}: {lhs}"
            break
    out.append(CheckResult("[omega, x^i] = (1-q) dx^i", bad is None, bad or ""))
    r = Form.from_poly(NCPoly.r(N), rs)
    dr = exterior_d(r)
    ok = dr * RadialProfile.power(-1) == w
    out.append(CheckResult("omega = dr r^-1", ok, "" if ok else str(dr)))
    one = Form.from_poly(NCPoly.const(N, 1), rs)
    d1 = exterior_d(one)
    out.append(CheckResult("d 1 = 0", d1.is_zero(), "" if d1.is_zero() else str(d1)))
    h = random_profile(rng, compact=False)
    lhs = w * Form.function(rs, h)
    rhs = RadialProfile.shift(h, -1) * w
    out.append(CheckResult("omega h(r) = h(r/q) omega", lhs == rhs, "" if lhs == rhs else "mismatch"))
    bad = None
    for k in range(samples):
        for deg in range(0, N):
            a = random_form(rs, deg, rng, profile="mixed")
            dda = exterior_d(exterior_d(a))
            if not dda.is_zero() and bad is None:
                bad = f"sample {k}, degree {deg}: {dda}"
    out.append(CheckResult("d^2 = 0", bad is None, bad or ""))
    bad = None
    for k in range(samples):
        a = random_form(rs, N, rng, profile="mixed")
        lhs = integrate_form_over_sphere(scale_form(a))
        rhs = integrate_form_over_sphere(a).shift(1)
        if lhs != rhs and bad is None:
            bad = f"sample {k}: {lhs} != {rhs}"
    out.append(CheckResult("sphere scaling", bad is None, bad or ""))
    return out


def check_cyclic_forms(s: SoqData, rs: RewriteSystem, samples: int = 5, seed: int = 0, ks=None, tdeg: int = 3):
    """Cyclic property of form integrals at radius r, on the sphere and on space."""
    rng = random.Random(seed)
    N = s.N
    bad = {"any": None, "sph": None, "x": None}
    nz = {"any": 0, "sph": 0, "x": 0}
    total = 0

    def record(tag, lhs, rhs, where):
        nz[tag] += not lhs.is_zero()
        if lhs != rhs and bad[tag] is None:
            bad[tag] = f"{where}: {lhs} != {rhs}"

    for trial in range(samples):
        for k in ks or range(1, N):
            total += 1
            where = f"k={k}, sample {trial}"
            sign = (-1) ** (k * (N - k))
            a = random_form(rs, k, rng, tdeg=tdeg, profile="mixed")
            b = random_form(rs, N - k, rng, tdeg=tdeg, profile="mixed")
            record("any", sphere_record(a * b), sphere_record(b * twist_form(a, N)).shift(-k) * sign, where)
            a = random_form(rs, k, rng, tdeg=tdeg, sphere=True)
            b = random_form(rs, N - k, rng, tdeg=tdeg, sphere=True)
            record("sph", sphere_record(a * b), sphere_record(b * twist_form(a, 0)) * sign, where)
            a = random_form(rs, k, rng, tdeg=tdeg)
            b = random_form(rs, N - k, rng, tdeg=tdeg)
            record("x", integrate_form_over_space(a * b),
                   integrate_form_over_space(b * twist_form(a, N)) * sign, where)
    names = {"any": "cyclic forms (radius r)", "sph": "cyclic forms (sphere)", "x": "cyclic forms (space)"}
    return [
        CheckResult(names[t], bad[t] is None, bad[t] or f"{nz[t]}/{total} samples nonzero")
        for t in ("any", "sph", "x")
    ]


def check_stokes(s: SoqData, rs: RewriteSystem, samples: int = 10, seed: int = 0, variants=None,
                 max_window: int = 8, tdeg: int = 3):
    """Space, sphere and annulus Stokes on seeded random forms.

    Passing witnesses count the samples whose individual terms were nonzero,
    so a vacuous 0 = 0 pass is visible in the report.
    """
    rng = random.Random(seed)
    N = s.N
    Q = q()
    w = omega(rs)
    variants = variants or ("space", "sphere", "annulus", "saturation")
    out = []

    def result(name, bad, nonzero, what):
        return CheckResult(name, bad is None, bad or f"{nonzero}/{samples} samples with nonzero {what}")

    if "space" in variants:
        bad, nz = None, 0
        for k in range(samples):
            alpha = random_form(rs, N - 1, rng, tdeg=tdeg)
            nz += not integrate_form_over_space(w * alpha).is_zero()
            res = stokes_space(alpha)
            if not res.passed and bad is None:
                bad = f"sample {k}: {res.witness}"
        out.append(result("space Stokes", bad, nz, "integral of omega alpha"))
    if "sphere" in variants:
        bad, nz = None, 0
        for k in range(samples):
            alpha = random_form(rs, N - 2, rng, tdeg=tdeg, sphere=True)
            nz += not exterior_d(alpha).is_zero()
            res = stokes_sphere(alpha)
            if not res.passed and bad is None:
                bad = f"sample {k}: {res.witness}"
        out.append(result("sphere Stokes", bad, nz, "d alpha"))
    if "annulus" in variants:
        bad, nz = None, 0
        for k in range(samples):
            alpha = random_form(rs, N - 1, rng, tdeg=tdeg, profile="mixed")
            lo = rng.randint(-4, 2)
            hi = lo + rng.randint(1, max_window)
            nz += not integrate_annulus(exterior_d(alpha), lo, hi).is_zero()
            res = stokes_annulus(alpha, lo, hi)
            if not res.passed and bad is None:
                bad = f"sample {k}: {res.witness}"
        out.append(result("annulus Stokes", bad, nz, "boundary terms"))
    if "saturation" in variants:
        bad, nz = None, 0
        for k in range(samples):
            a = random_form(rs, N, rng, tdeg=tdeg)
            support = [n for h in a.terms.values() for n in h.loc]
            lo, hi = min(support, default=0) - 1, max(support, default=0) + 2
            ann = integrate_annulus(a, lo, hi)
            space = integrate_form_over_space(a) * R0Poly({1: Q - 1})
            nz += not ann.is_zero()
            if ann != space and bad is None:
                bad = f"sample {k}: {ann} != {space}"
        out.append(result("annulus saturates to space", bad, nz, "integrals"))
    return out
