"""Exact arithmetic in the field of rational functions of the deformation parameter q.

Values live in Q(s) with ``s = q**(1/2)``.  Structure data for odd N needs
half-integer powers of q, so the half power is built in; everything that is
genuinely a function of q (which is all even functions of s) prints, serializes
and evaluates as an ordinary rational function of q.

Canonical form: ``value = s**lo * num(s) / den(s)`` where ``num`` and ``den``
are coprime polynomials with nonzero constant terms and ``den`` is monic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import flint

__all__ = [
    "QScalar",
    "Expansion",
    "PoleError",
    "HalfPowerError",
    "q",
    "sqrt_q",
    "ONE",
    "ZERO",
    "as_scalar",
    "expand_at_one",
    "analytic_at_one",
    "eval_numeric",
    "qint_number",
]

_ZERO_POLY = flint.fmpq_poly([])
_ONE_POLY = flint.fmpq_poly([1])


class PoleError(ZeroDivisionError):
    """Evaluation of a rational function at one of its poles."""


class HalfPowerError(ValueError):
    """A value involving q**(1/2) was evaluated where sqrt(q0) is irrational."""


def _lowest(p):
    """Return (p / s**k, k) with k the lowest exponent present in p."""
    cs = p.coeffs()
    k = 0
    while k < len(cs) and cs[k] == 0:
        k += 1
    if k == 0:
        return p, 0
    return flint.fmpq_poly(cs[k:]), k


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class QScalar:
    """Immutable element of Q(q**(1/2)) held in canonical form."""

    __slots__ = ("_lo", "_num", "_den", "_hash")

    def __init__(self, value=0):
        if isinstance(value, QScalar):
            self._lo, self._num, self._den = value._lo, value._num, value._den
        else:
            fr = Fraction(value)
            self._lo = 0
            self._num = flint.fmpq_poly([flint.fmpq(fr.numerator, fr.denominator)]) if fr else _ZERO_POLY
            self._den = _ONE_POLY
        self._hash = None

    @classmethod
    def _raw(cls, lo, num, den):
        obj = object.__new__(cls)
        obj._lo, obj._num, obj._den, obj._hash = lo, num, den, None
        return obj

    @classmethod
    def _make(cls, lo, num, den):
        """Canonicalize s**lo * num/den (den(0) != 0 is assumed)."""
        if num.is_zero():
            return ZERO
        if den.degree() > 0:
            g = num.gcd(den)
            if g.degree() > 0:
                num = num // g
                den = den // g
        num, k = _lowest(num)
        lc = den.coeffs()[-1]
        if lc != 1:
            num = num / lc
            den = den / lc
        return cls._raw(lo + k, num, den)

    @classmethod
    def from_laurent(cls, coeffs, lo=0, half=False):
        """Laurent polynomial sum_k coeffs[k] * q**(lo+k) (or in s when ``half``)."""
        step = 1 if half else 2
        cs = [0] * (step * (len(coeffs) - 1) + 1) if coeffs else []
        for k, c in enumerate(coeffs):
            fr = Fraction(c)
            cs[step * k] = flint.fmpq(fr.numerator, fr.denominator)
        return cls._make(step * lo, flint.fmpq_poly(cs), _ONE_POLY)

    @classmethod
    def monomial(cls, exponent, coeff=1):
        """coeff * q**exponent, exponent an int or a half-integer Fraction."""
        e2 = Fraction(exponent) * 2
        if e2.denominator != 1:
            raise ValueError(f"exponent {exponent} is not a half-integer")
        fr = Fraction(coeff)
        if not fr:
            return ZERO
        return cls._raw(int(e2), flint.fmpq_poly([flint.fmpq(fr.numerator, fr.denominator)]), _ONE_POLY)

    # -- structure -----------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self._num.is_zero()

    def __bool__(self):
        return not self._num.is_zero()

    def is_even(self) -> bool:
        """True when the value is a rational function of q (no odd power of s)."""
        if self._lo % 2:
            return False
        return all(c == 0 for c in self._num.coeffs()[1::2]) and all(
            c == 0 for c in self._den.coeffs()[1::2]
        )

    def is_constant(self) -> bool:
        return self._lo == 0 and self._num.degree() <= 0 and self._den.degree() == 0

    def constant(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return _to_fraction(self._num.coeffs()[0])

    def is_laurent(self) -> bool:
        return self._den.degree() == 0

    def laurent_terms(self):
        """Map exponent-of-s -> Fraction for a Laurent polynomial value."""
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return {self._lo + k: _to_fraction(c) for k, c in enumerate(self._num.coeffs()) if c != 0}

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QScalar):
            if isinstance(other, (int, Fraction)):
                other = QScalar(other)
            else:
                return NotImplemented
        if self._num.is_zero():
            return other
        if other._num.is_zero():
            return self
        lo = min(self._lo, other._lo)
        sa = _shift(self._num, self._lo - lo)
        sb = _shift(other._num, other._lo - lo)
        if self._den == other._den:
            return QScalar._make(lo, sa + sb, self._den)
        return QScalar._make(lo, sa * other._den + sb * self._den, self._den * other._den)

    __radd__ = __add__

    def __neg__(self):
        if self._num.is_zero():
            return self
        return QScalar._raw(self._lo, -self._num, self._den)

    def __sub__(self, other):
        if not isinstance(other, QScalar):
            if isinstance(other, (int, Fraction)):
                other = QScalar(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return QScalar(other) - self

    def __mul__(self, other):
        if not isinstance(other, QScalar):
            if isinstance(other, (int, Fraction)):
                if not other:
                    return ZERO
                fr = Fraction(other)
                return QScalar._raw(self._lo, self._num * flint.fmpq(fr.numerator, fr.denominator), self._den)
            return NotImplemented
        if self._num.is_zero() or other._num.is_zero():
            return ZERO
        lo = self._lo + other._lo
        if self._den.degree() == 0 and other._den.degree() == 0:
            return QScalar._raw(lo, self._num * other._num, _ONE_POLY)
        n1, d1, n2, d2 = self._num, self._den, other._num, other._den
        if d2.degree() > 0:
            g = n1.gcd(d2)
            if g.degree() > 0:
                n1, d2 = n1 // g, d2 // g
        if d1.degree() > 0:
            g = n2.gcd(d1)
            if g.degree() > 0:
                n2, d1 = n2 // g, d1 // g
        num, den = n1 * n2, d1 * d2
        lc = den.coeffs()[-1]
        if lc != 1:
            num, den = num / lc, den / lc
        return QScalar._raw(lo, num, den)

    __rmul__ = __mul__

    def inverse(self):
        if self._num.is_zero():
            raise ZeroDivisionError("division by zero in Q(q)")
        return QScalar._make(-self._lo, self._den, self._num)

    def __truediv__(self, other):
        if not isinstance(other, QScalar):
            if isinstance(other, (int, Fraction)):
                other = QScalar(other)
            else:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QScalar(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if self._den.degree() == 0 and self._num.degree() == 0:
            c = self._num.coeffs()[0] if not self._num.is_zero() else 0
            if n == 0:
                return ONE
            return QScalar._raw(self._lo * n, flint.fmpq_poly([c**n]), _ONE_POLY) if c else ZERO
        return QScalar._raw(self._lo * n, self._num**n, self._den**n) if n else ONE

    # -- comparison ----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QScalar(other)
        if not isinstance(other, QScalar):
            return NotImplemented
        if self._num.is_zero() or other._num.is_zero():
            return self._num.is_zero() and other._num.is_zero()
        return self._lo == other._lo and self._num == other._num and self._den == other._den

    def __hash__(self):
        if self._hash is None:
            if self._num.is_zero():
                self._hash = hash(0)
            elif self.is_constant():
                self._hash = hash(self.constant())
            else:
                self._hash = hash((self._lo, tuple(self._num.coeffs()), tuple(self._den.coeffs())))
        return self._hash

    # -- substitution --------------------------------------------------
    def subs_q_power(self, k: int):
        """Return the value with q replaced by q**k (k a nonzero integer)."""
        if k == 1:
            return self
        sk = sqrt_q() ** k
        return _eval_in(self, sk)

    # -- printing ------------------------------------------------------
    def __repr__(self):
        return f"QScalar({str(self)!r})"

    def __str__(self):
        if self._num.is_zero():
            return "0"
        num = _laurent_str(self._num, self._lo)
        if self._den.degree() == 0:
            return num
        den = _laurent_str(self._den, 0)
        if len(_terms(self._num, self._lo)) > 1:
            num = f"({num})"
        return f"{num}/({den})"

    # -- JSON ----------------------------------------------------------
    def to_json(self):
        if self.is_even():
            step, lo = 2, self._lo // 2
            out = {
                "num": {"lo": lo, "coeffs": [str(_to_fraction(c)) for c in self._num.coeffs()[::2]]},
                "den": {"lo": 0, "coeffs": [str(_to_fraction(c)) for c in self._den.coeffs()[::2]]},
            }
        else:
            out = {
                "num": {"lo": self._lo, "coeffs": [str(_to_fraction(c)) for c in self._num.coeffs()]},
                "den": {"lo": 0, "coeffs": [str(_to_fraction(c)) for c in self._den.coeffs()]},
                "var": "q^(1/2)",
            }
        if not self._num.coeffs():
            out["num"] = {"lo": 0, "coeffs": []}
        return out

    @classmethod
    def from_json(cls, data):
        half = data.get("var") == "q^(1/2)"
        num = cls.from_laurent([Fraction(c) for c in data["num"]["coeffs"]], data["num"]["lo"], half)
        den = cls.from_laurent([Fraction(c) for c in data["den"]["coeffs"]], data["den"].get("lo", 0), half)
        return num / den


def _shift(p, k):
    if k == 0:
        return p
    return flint.fmpq_poly([0] * k + p.coeffs())


def _terms(p, lo):
    return [(lo + k, _to_fraction(c)) for k, c in enumerate(p.coeffs()) if c != 0]


def _laurent_str(p, lo):
    terms = _terms(p, lo)
    even = all(e % 2 == 0 for e, _ in terms)
    parts = []
    for e, c in reversed(terms):
        if even:
            mono = _mono_str(e // 2, "q")
        else:
            mono = _mono_str(Fraction(e, 2), "q")
        if mono == "1":
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _mono_str(e, var):
    if e == 0:
        return "1"
    if e == 1:
        return var
    if isinstance(e, Fraction) and e.denominator != 1:
        return f"{var}^({e})"
    return f"{var}^{int(e)}" if e > 0 else f"{var}^({int(e)})"


def _eval_in(a: QScalar, s_value: QScalar) -> QScalar:
    """Substitute s -> s_value in a (s_value a nonzero QScalar)."""

    def poly_at(p):
        acc = ZERO
        for c in reversed(p.coeffs()):
            acc = acc * s_value + QScalar(_to_fraction(c))
        return acc

    return poly_at(a._num) * s_value ** a._lo / poly_at(a._den)


ZERO = QScalar._raw(0, _ZERO_POLY, _ONE_POLY)
ONE = QScalar._raw(0, _ONE_POLY, _ONE_POLY)


@lru_cache(maxsize=None)
def sqrt_q() -> QScalar:
    return QScalar._raw(1, _ONE_POLY, _ONE_POLY)


@lru_cache(maxsize=None)
def q() -> QScalar:
    return QScalar._raw(2, _ONE_POLY, _ONE_POLY)


def as_scalar(value) -> QScalar:
    return value if isinstance(value, QScalar) else QScalar(value)


def qint_number(n: int) -> QScalar:
    """The symmetric quantum integer (q^n - q^-n)/(q - q^-1)."""
    return (q() ** n - q() ** (-n)) / (q() - q() ** (-1))


# ---------------------------------------------------------------------------
# expansion at q = 1


@dataclass(frozen=True)
class Expansion:
    """Laurent expansion of a value in powers of (q - 1).

    ``coeffs[k]`` is the coefficient of (q-1)**k for k = 0..order and
    ``principal[j]`` the coefficient of (q-1)**(valuation + j) for the
    negative powers (empty when the value is analytic at q = 1).
    """

    valuation: int
    coeffs: list = field(default_factory=list)
    principal: list = field(default_factory=list)

    @property
    def analytic(self) -> bool:
        return self.valuation >= 0

    @property
    def pole_order(self) -> int:
        return max(0, -self.valuation)


def _series_mul(a, b, prec):
    out = [Fraction(0)] * prec
    for i, x in enumerate(a[:prec]):
        if x:
            for j, y in enumerate(b[: prec - i]):
                out[i + j] += x * y
    return out


def _sqrt_series(prec, power):
    """Series of (1+e)**(power/2) to prec terms."""
    alpha = Fraction(power, 2)
    out = [Fraction(1)]
    c = Fraction(1)
    for k in range(1, prec):
        c = c * (alpha - (k - 1)) / k
        out.append(c)
    return out


def _poly_series(p, prec, s_series):
    acc = [Fraction(0)] * prec
    for c in reversed(p.coeffs()):
        acc = _series_mul(acc, s_series, prec)
        acc[0] += _to_fraction(c)
    return acc


def analytic_at_one(a) -> bool:
    """True when ``a`` has no pole at q = 1 (cheap form of expand_at_one(a, 0).analytic)."""
    a = as_scalar(a)
    return a.is_zero or a._den(1) != 0


def expand_at_one(a, order: int) -> Expansion:
    """Expand ``a`` in powers of (q-1) through (q-1)**order.

    Poles at q = 1 are reported through ``valuation`` and ``principal``.
    """
    a = as_scalar(a)
    if order < 0:
        raise ValueError("order must be nonnegative")
    if a.is_zero:
        return Expansion(order + 1, [Fraction(0)] * (order + 1), [])
    prec = order + a._num.degree() + a._den.degree() + 3
    s_ser = _sqrt_series(prec, 1)
    num = _series_mul(_poly_series(a._num, prec, s_ser), _sqrt_series(prec, a._lo), prec)
    den = _poly_series(a._den, prec, s_ser)
    vd = next(i for i, c in enumerate(den) if c)
    vn = next((i for i, c in enumerate(num) if c), prec)
    den = den[vd:]
    num = num[vn:]
    # series division num/den
    n_terms = order - (vn - vd) + 1
    quot = []
    rem = num + [Fraction(0)] * max(0, n_terms - len(num))
    for k in range(max(n_terms, 0)):
        c = rem[k] / den[0]
        quot.append(c)
        if c:
            for j in range(1, min(len(den), len(rem) - k)):
                rem[k + j] -= c * den[j]
    valuation = vn - vd
    coeffs, principal = [], []
    for idx, c in enumerate(quot):
        e = valuation + idx
        if e < 0:
            principal.append(c)
        elif e <= order:
            coeffs.append(c)
    # leading zeros for analytic values with positive valuation
    if valuation > 0:
        coeffs = [Fraction(0)] * min(valuation, order + 1) + coeffs
        coeffs = coeffs[: order + 1]
    while len(coeffs) < order + 1:
        coeffs.append(Fraction(0))
    return Expansion(valuation, coeffs, principal)


# ---------------------------------------------------------------------------
# numeric evaluation


def _rational_sqrt(x: Fraction):
    if x < 0:
        return None
    from math import isqrt

    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def eval_numeric(a, q0) -> Fraction:
    """Exact value of ``a`` at the rational point q = q0."""
    a = as_scalar(a)
    q0 = Fraction(q0)
    if a.is_zero:
        return Fraction(0)
    if a.is_even():
        x = q0
        num_c = a._num.coeffs()[::2]
        den_c = a._den.coeffs()[::2]
        lo = a._lo // 2
    else:
        x = _rational_sqrt(q0)
        if x is None:
            raise HalfPowerError(f"{a} involves q^(1/2) and sqrt({q0}) is irrational")
        num_c = a._num.coeffs()
        den_c = a._den.coeffs()
        lo = a._lo

    def horner(cs):
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * x + _to_fraction(c)
        return acc

    d = horner(den_c)
    if d == 0:
        raise PoleError(f"{a} has a pole at q = {q0}")
    if x == 0 and lo < 0:
        raise PoleError(f"{a} has a pole at q = 0")
    return horner(num_c) * x**lo / d
