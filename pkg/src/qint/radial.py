"""Radial profiles on the q-lattice, Jackson functionals, and profiled forms.

A RadialProfile is a function of r made of two parts: a Laurent polynomial
in r valid everywhere, and finitely many lattice values at r = q^n r0.  The
base r0 stays symbolic, so values and integrals are Laurent polynomials in
r0 (R0Poly).

A Form stores terms (dx-word, x-word) -> RadialProfile, meaning
``dx^I x^J r^-|J| h(r)``: all dx letters left, then a t-monomial, then the
radial factor.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

from .coeff import ONE, ZERO, QScalar, as_scalar, eval_numeric, q

__all__ = ["R0Poly", "RadialProfile", "RadialFunctional", "Form", "radial_integrate"]


class R0Poly:
    """Laurent polynomial in the symbolic base r0 with QScalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for m, c in (terms or {}).items():
            c = as_scalar(c)
            if c:
                self.terms[int(m)] = c

    @classmethod
    def const(cls, c):
        return cls({0: c})

    def __add__(self, other):
        other = _as_r0(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, ZERO) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return _r0(out)

    __radd__ = __add__

    def __neg__(self):
        return _r0({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_r0(other))

    def __rsub__(self, other):
        return _as_r0(other) - self

    def __mul__(self, other):
        if not isinstance(other, R0Poly):
            s = as_scalar(other)
            return _r0({m: c * s for m, c in self.terms.items() if s})
        acc = defaultdict(lambda: ZERO)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                acc[m1 + m2] = acc[m1 + m2] + c1 * c2
        return _r0({m: c for m, c in acc.items() if c})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, R0Poly):
            return self.terms == other.terms
        try:
            return self.terms == _as_r0(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def scalar(self) -> QScalar:
        if any(m for m in self.terms):
            raise ValueError("R0Poly depends on r0")
        return self.terms.get(0, ZERO)

    def evaluate(self, q0, r0=1) -> Fraction:
        r0 = Fraction(r0)
        return sum((eval_numeric(c, q0) * r0**m for m, c in self.terms.items()), Fraction(0))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = str(self.terms[m])
            if m == 0:
                parts.append(c)
            else:
                mono = "r0" if m == 1 else f"r0^{m}" if m > 0 else f"r0^({m})"
                parts.append(mono if c == "1" else f"({c}) {mono}")
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self):
        return [{"r0_power": m, "coeff": self.terms[m].to_json()} for m in sorted(self.terms)]


def _r0(terms):
    obj = object.__new__(R0Poly)
    obj.terms = terms
    return obj


def _as_r0(x):
    if isinstance(x, R0Poly):
        return x
    if isinstance(x, (int, Fraction, QScalar)):
        return R0Poly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as R0Poly")


class RadialProfile:
    """h(r) = sum_m c_m r^m + sum_n [r = q^n r0] v_n   (v_n in Q(q)[r0^{+-1}])."""

    __slots__ = ("glob", "loc")

    def __init__(self, glob=None, loc=None):
        self.glob = {int(m): as_scalar(c) for m, c in (glob or {}).items() if as_scalar(c)}
        self.loc = {int(n): _as_r0(v) for n, v in (loc or {}).items() if _as_r0(v)}

    @classmethod
    def _trusted(cls, glob, loc):
        obj = object.__new__(cls)
        obj.glob, obj.loc = glob, loc
        return obj

    @classmethod
    def power(cls, m=0, c=1):
        """c r^m on the whole half line."""
        return cls({m: c})

    @classmethod
    def one(cls):
        return cls({0: ONE})

    @classmethod
    def lattice(cls, support, m=0):
        """r^m sum_n c_n [r = q^n r0]."""
        Q = q()
        loc = {}
        for n, c in support.items():
            loc[n] = R0Poly({m: as_scalar(c) * Q ** (n * m)})
        return cls(None, loc)

    def is_compact(self):
        return not self.glob

    def is_zero(self):
        return not self.glob and not self.loc

    def support(self):
        return sorted(self.loc)

    def global_value(self, n) -> R0Poly:
        Q = q()
        return _r0({m: c * Q ** (n * m) for m, c in self.glob.items()})

    def value_at(self, n) -> R0Poly:
        """h(q^n r0)."""
        v = self.global_value(n)
        loc = self.loc.get(n)
        return v + loc if loc is not None else v

    def __add__(self, other):
        other = _as_profile(other)
        glob = dict(self.glob)
        for m, c in other.glob.items():
            v = glob.get(m, ZERO) + c
            if v:
                glob[m] = v
            else:
                glob.pop(m, None)
        loc = dict(self.loc)
        for n, c in other.loc.items():
            v = loc[n] + c if n in loc else c
            if v:
                loc[n] = v
            else:
                loc.pop(n, None)
        return RadialProfile._trusted(glob, loc)

    __radd__ = __add__

    def __neg__(self):
        return RadialProfile._trusted({m: -c for m, c in self.glob.items()}, {n: -v for n, v in self.loc.items()})

    def __sub__(self, other):
        return self + (-_as_profile(other))

    def __mul__(self, other):
        if not isinstance(other, RadialProfile):
            if not isinstance(other, (int, Fraction, QScalar)):
                return NotImplemented
            s = as_scalar(other)
            if not s:
                return RadialProfile._trusted({}, {})
            return RadialProfile._trusted(
                {m: c * s for m, c in self.glob.items()}, {n: v * s for n, v in self.loc.items()}
            )
        glob = defaultdict(lambda: ZERO)
        for m1, c1 in self.glob.items():
            for m2, c2 in other.glob.items():
                glob[m1 + m2] = glob[m1 + m2] + c1 * c2
        loc = {}
        # (G1 + L1)(G2 + L2) = G1 G2 + [G1 L2 + L1 G2 + L1 L2] on lattice points
        for n in set(self.loc) | set(other.loc):
            a1, a2 = self.loc.get(n), other.loc.get(n)
            v = R0Poly()
            if a2 is not None:
                v = v + self.global_value(n) * a2
            if a1 is not None:
                v = v + a1 * other.global_value(n)
            if a1 is not None and a2 is not None:
                v = v + a1 * a2
            if v:
                loc[n] = v
        return RadialProfile._trusted({m: c for m, c in glob.items() if c}, loc)

    def __rmul__(self, other):
        return self.__mul__(other)

    def times_power(self, m):
        return self * RadialProfile.power(m)

    def shift(self, k: int):
        """The profile r -> h(q^k r)."""
        if k == 0:
            return self
        Q = q()
        glob = {m: c * Q ** (k * m) for m, c in self.glob.items()}
        loc = {n - k: v for n, v in self.loc.items()}
        return RadialProfile._trusted(glob, loc)

    def map_coeffs(self, fn):
        glob = {m: fn(c) for m, c in self.glob.items()}
        loc = {n: _r0({m: fn(c) for m, c in v.terms.items()}) for n, v in self.loc.items()}
        return RadialProfile(glob, loc)

    def __eq__(self, other):
        if not isinstance(other, RadialProfile):
            try:
                other = _as_profile(other)
            except TypeError:
                return NotImplemented
        return self.glob == other.glob and self.loc == other.loc

    def __hash__(self):
        return hash((frozenset(self.glob.items()), frozenset(self.loc.items())))

    def __str__(self):
        parts = []
        for m in sorted(self.glob):
            parts.append(f"({self.glob[m]}) r^{m}" if m else f"({self.glob[m]})")
        for n in sorted(self.loc):
            parts.append(f"[r=q^{n} r0]({self.loc[n]})")
        return " + ".join(parts) or "0"

    __repr__ = __str__


def _as_profile(x):
    if isinstance(x, RadialProfile):
        return x
    if isinstance(x, (int, Fraction, QScalar)):
        return RadialProfile.power(0, x)
    raise TypeError(f"cannot use {type(x).__name__} as RadialProfile")


class RadialFunctional:
    """Radial integral on the q-lattice.

    ``jackson_delta``: <h>_r = sum_n h(q^n r0) q^n (needs a compact profile).
    ``finite_window``: <h>_r = (q-1) sum_{n=k}^{l-1} h(q^n r0), a Riemann sum
    for the integral of h dr/r over [q^k r0, q^l r0].
    """

    def __init__(self, kind="jackson_delta", k=None, l=None):
        if kind not in ("jackson_delta", "finite_window"):
            raise ValueError(f"unknown radial functional {kind!r}")
        if kind == "finite_window":
            if k is None or l is None or k >= l:
                raise ValueError("finite window needs k < l")
        self.kind, self.k, self.l = kind, k, l

    @classmethod
    def jackson_delta(cls):
        return cls("jackson_delta")

    @classmethod
    def finite_window(cls, k, l):
        return cls("finite_window", k, l)

    def __repr__(self):
        if self.kind == "jackson_delta":
            return "RadialFunctional(jackson_delta)"
        return f"RadialFunctional(finite_window, k={self.k}, l={self.l})"

    def integrate(self, h: RadialProfile) -> R0Poly:
        Q = q()
        if self.kind == "jackson_delta":
            if not h.is_compact():
                raise ValueError("the delta-weight Jackson sum needs a lattice-compact profile")
            out = R0Poly()
            for n, v in h.loc.items():
                out = out + v * Q**n
            return out
        out = R0Poly()
        for n in range(self.k, self.l):
            out = out + h.value_at(n)
        return out * (Q - 1)

    def integrate_dr(self, h: RadialProfile) -> R0Poly:
        """Integral of h(r) dr in this functional's own normalization."""
        if self.kind == "jackson_delta":
            return self.integrate(h)
        return self.integrate(h.times_power(1))


def radial_integrate(h: RadialProfile, F: RadialFunctional) -> R0Poly:
    return F.integrate(h)


# ---------------------------------------------------------------------------


class Form:
    """Sum of dx^I x^J r^-|J| h(r) over (I, J) with dx-words I and x-words J.

    I and J are tuples of letter codes of the rewriting alphabet.  Products go
    through the rewriting system ``rs``; h(r) dx = dx h(q r).
    """

    __slots__ = ("rs", "terms")

    def __init__(self, rs, terms=None):
        self.rs = rs
        self.terms = {}
        for key, h in (terms or {}).items():
            h = _as_profile(h)
            if not h.is_zero():
                self.terms[key] = self.terms[key] + h if key in self.terms else h
        self.terms = {k: v for k, v in self.terms.items() if not v.is_zero()}

    @property
    def N(self):
        return self.rs.N

    @classmethod
    def from_poly(cls, p, rs, profile=None):
        """Lift an NCPoly in x, dx, r letters (any order) times a profile."""
        from .ncalg import NCPoly

        if not isinstance(p, NCPoly):
            p = NCPoly.const(rs.N, p)
        profile = RadialProfile.one() if profile is None else _as_profile(profile)
        a = rs.alpha
        if "del" in p.kinds():
            raise ValueError("forms do not contain del letters")
        out = {}
        for w, c in rs.normalize(p).terms.items():
            key, power = _split_normal(a, w)
            h = RadialProfile.power(power, c) * profile
            out[key] = out[key] + h if key in out else h
        return cls(rs, out)

    @classmethod
    def function(cls, rs, profile):
        return cls(rs, {((), ()): profile})

    def degree(self):
        degs = {len(I) for (I, _) in self.terms}
        if len(degs) > 1:
            raise ValueError("inhomogeneous form")
        return degs.pop() if degs else 0

    def degrees(self):
        return sorted({len(I) for (I, _) in self.terms})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, Form):
            other = Form(self.rs, {((), ()): _as_profile(other)})
        out = dict(self.terms)
        for k, h in other.terms.items():
            v = out[k] + h if k in out else h
            if v.is_zero():
                out.pop(k, None)
            else:
                out[k] = v
        return _form(self.rs, out)

    __radd__ = __add__

    def __neg__(self):
        return _form(self.rs, {k: -h for k, h in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_scalar(c)
        return _form(self.rs, {k: h * c for k, h in self.terms.items()} if c else {})

    def __mul__(self, other):
        if not isinstance(other, Form):
            if isinstance(other, RadialProfile):
                return _form(self.rs, {k: h * other for k, h in self.terms.items() if not (h * other).is_zero()})
            return self.scale(other)
        rs = self.rs
        out = {}
        for (I, J), h1 in self.terms.items():
            for (K, L), h2 in other.terms.items():
                h = h1.shift(len(K)) * h2
                if h.is_zero():
                    continue
                for key, prof in _product_words(rs, I, J, K, L).items():
                    term = h * prof
                    out[key] = out[key] + term if key in out else term
        return _form(rs, {k: v for k, v in out.items() if not v.is_zero()})

    def __rmul__(self, other):
        if isinstance(other, RadialProfile):
            # h(r) dx^I ... = dx^I h(q^|I| r) ...
            out = {}
            for (I, J), h in self.terms.items():
                v = other.shift(len(I)) * h
                if not v.is_zero():
                    out[(I, J)] = v
            return _form(self.rs, out)
        return self.scale(other)

    def map_profiles(self, fn):
        return _form(self.rs, {k: fn(h) for k, h in self.terms.items() if not fn(h).is_zero()})

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        a = self.rs.alpha
        parts = []
        for (I, J), h in sorted(self.terms.items()):
            word = " ".join(a.letter_str(c) for c in I + J)
            if J:
                word += f" r^-{len(J)}"
            parts.append(f"{word or '1'} * [{h}]")
        return " + ".join(parts)

    __repr__ = __str__


def _form(rs, terms):
    obj = object.__new__(Form)
    obj.rs, obj.terms = rs, terms
    return obj


def _split_normal(a, w):
    """Normal word dx^I r^k x^J -> ((I, J), k + |J|)."""
    I, J, k = [], [], 0
    for c in w:
        kind = a.kind(c)[0]
        if kind == "dx":
            I.append(c)
        elif kind == "x":
            J.append(c)
        elif kind == "r":
            k += 1
        elif kind == "rinv":
            k -= 1
        else:
            raise ValueError("del letter in a form")
    return (tuple(I), tuple(J)), k + len(J)


def _product_words(rs, I, J, K, L):
    key = ("formprod", I, J, K, L)
    hit = rs._memo.get(key)
    if hit is not None:
        return hit
    a = rs.alpha
    word = I + J + (a.RINV,) * len(J) + K + L + (a.RINV,) * len(L)
    out = {}
    for w, c in rs.normalize_word(word).items():
        k, power = _split_normal(a, w)
        h = RadialProfile.power(power, c)
        out[k] = out[k] + h if k in out else h
    out = {k: h for k, h in out.items() if not h.is_zero()}
    rs._memo[key] = out
    return out
