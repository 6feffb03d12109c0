"""Expression language for NC polynomials.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*')? factor)*
    factor := '-' factor | atom ('^' int)?
    atom   := rational | 'q' | 'r' | 'r^-1' | sym '[' idx (',' idx)? ']' | '(' expr ')'
    sym    := 'x' | 'dx' | 'del' | 't' | 'g'

Juxtaposition multiplies in written order.  ``t[i]`` lowers to x[i] r^-1 and
``g[i,j]`` to the metric entry g_ij.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .coeff import ONE, QScalar, q
from .ncalg import NCPoly

__all__ = ["ParseError", "LoweringError", "parse", "lower", "to_text", "parse_poly", "Num", "Sym", "Add", "Mul", "Pow", "Neg"]


class ParseError(ValueError):
    def __init__(self, msg, line, col):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line, self.col = line, col


class LoweringError(ValueError):
    pass


# AST -----------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Sym:
    name: str  # q, r, x, dx, del, t, g
    idx: tuple = ()


@dataclass(frozen=True)
class Add:
    terms: tuple  # ((sign, node), ...)


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Neg:
    arg: object


# tokenizer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>del|dx|x|t|g|q|r)(?![A-Za-z_])|(?P<op>[-+*^()\[\],]))"
)


def _tokens(text):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", *_linecol(text, pos))
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", n))
    return out


def _linecol(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, *_linecol(self.text, tok[2]))

    def expect(self, value):
        t = self.peek()
        if t[1] != value or t[0] not in ("op",):
            self.error(f"expected {value!r}, found {t[1] or 'end of input'!r}")
        return self.take()

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        terms = [(1, self.term())]
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            sign = 1 if self.take()[1] == "+" else -1
            terms.append((sign, self.term()))
        return terms[0][1] if len(terms) == 1 else Add(tuple(terms))

    def _starts_factor(self, tok):
        return tok[0] in ("num", "name") or (tok[0] == "op" and tok[1] in ("(",))

    def term(self):
        factors = [self.factor()]
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                factors.append(self.factor())
            elif self._starts_factor(t):
                factors.append(self.factor())
            else:
                break
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def factor(self):
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return Neg(self.factor())
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[1] == "-" and self.peek()[0] == "op":
                self.take()
                sign = -1
            t = self.peek()
            if t[0] != "num" or "/" in t[1]:
                self.error("expected an integer exponent")
            self.take()
            return Pow(base, sign * int(t[1]))
        return base

    def atom(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            return Num(Fraction(t[1]))
        if t[0] == "op" and t[1] == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if t[0] == "name":
            self.take()
            name = t[1]
            if name in ("q", "r"):
                return Sym(name)
            self.expect("[")
            idx = [self.index()]
            if self.peek()[1] == ",":
                self.take()
                idx.append(self.index())
            self.expect("]")
            want = 2 if name == "g" else 1
            if len(idx) != want:
                self.error(f"{name}[...] takes {want} index(es)", t)
            return Sym(name, tuple(idx))
        self.error(f"unexpected {t[1] or 'end of input'!r}")

    def index(self):
        t = self.peek()
        if t[0] != "num" or "/" in t[1]:
            self.error("expected an integer index")
        self.take()
        return int(t[1])


def parse(text: str):
    """Parse text into an AST; raises ParseError with line and column."""
    return _Parser(text).parse()


# printing ------------------------------------------------------------------


def to_text(node) -> str:
    """Canonical text; parse(to_text(a)) == a."""
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Sym):
        if not node.idx:
            return node.name
        return f"{node.name}[{','.join(str(i) for i in node.idx)}]"
    if isinstance(node, Add):
        if node.terms[0][0] < 0:
            raise ValueError("a leading minus is carried by a Neg node")
        parts = [_wrap(node.terms[0][1], Add)]
        for sign, t in node.terms[1:]:
            parts.append(("+ " if sign > 0 else "- ") + _wrap(t, Add))
        return " ".join(parts)
    if isinstance(node, Mul):
        return " * ".join(_wrap(f, (Add, Mul)) for f in node.factors)
    if isinstance(node, Pow):
        return f"{_wrap(node.base, (Add, Mul, Pow, Neg))}^{node.exp}"
    if isinstance(node, Neg):
        return f"-{_wrap(node.arg, (Add, Mul))}"
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(node, kinds):
    s = to_text(node)
    return f"({s})" if isinstance(node, kinds) else s


# lowering ------------------------------------------------------------------


def lower(node, N: int, s=None, max_degree: int | None = None) -> NCPoly:
    """Lower an AST to an NCPoly over N generators (not normalized)."""
    if s is None:
        from .soq import build

        s = build(N)

    def go(n):
        if isinstance(n, Num):
            return NCPoly.const(N, n.value)
        if isinstance(n, Sym):
            for i in n.idx:
                if not 1 <= i <= N:
                    raise LoweringError(f"index {i} in {to_text(n)} is out of range 1..{N}")
            if n.name == "q":
                return NCPoly.const(N, q())
            if n.name == "r":
                return NCPoly.r(N)
            if n.name == "x":
                return NCPoly.x(N, n.idx[0])
            if n.name == "dx":
                return NCPoly.dx(N, n.idx[0])
            if n.name == "del":
                return NCPoly.d(N, n.idx[0])
            if n.name == "t":
                return NCPoly.t(N, n.idx[0])
            if n.name == "g":
                return NCPoly.const(N, s.g_lower[n.idx])
        if isinstance(n, Add):
            out = NCPoly(N)
            for sign, t in n.terms:
                v = go(t)
                out = out + v if sign > 0 else out - v
            return out
        if isinstance(n, Mul):
            out = NCPoly.const(N, 1)
            for f in n.factors:
                out = out * go(f)
            return out
        if isinstance(n, Neg):
            return -go(n.arg)
        if isinstance(n, Pow):
            base = go(n.base)
            if n.exp >= 0:
                if max_degree is not None and n.exp > max_degree:
                    raise LoweringError(f"power {n.exp} exceeds the degree limit {max_degree}")
                return base**n.exp
            if isinstance(n.base, Sym) and n.base.name == "r":
                return NCPoly.r(N, n.exp)
            if not any(base.terms.keys() - {()}):
                c = base.scalar()
                if not c:
                    raise LoweringError("division by zero")
                return NCPoly.const(N, c**n.exp)
            raise LoweringError(f"negative power of a non-scalar: {to_text(n)}")
        raise TypeError(f"not an expression node: {n!r}")

    out = go(node)
    if max_degree is not None:
        deg = max((len(w) for w in out.terms), default=0)
        if deg > max_degree:
            raise LoweringError(f"expression degree {deg} exceeds the degree limit {max_degree}")
    return out


def parse_poly(text: str, N: int, s=None, max_degree=None) -> NCPoly:
    return lower(parse(text), N, s, max_degree)


def parse_scalar(text: str) -> QScalar:
    """Parse an expression in q and rationals only."""
    node = parse(text)

    def go(n):
        if isinstance(n, Num):
            return QScalar(n.value)
        if isinstance(n, Sym):
            if n.name == "q":
                return q()
            raise LoweringError(f"{to_text(n)} is not a scalar")
        if isinstance(n, Add):
            out = QScalar(0)
            for sign, t in n.terms:
                out = out + go(t) if sign > 0 else out - go(t)
            return out
        if isinstance(n, Mul):
            out = ONE
            for f in n.factors:
                out = out * go(f)
            return out
        if isinstance(n, Neg):
            return -go(n.arg)
        if isinstance(n, Pow):
            b = go(n.base)
            if n.exp < 0 and not b:
                raise LoweringError("division by zero")
            return b**n.exp
        raise TypeError(n)

    return go(node)
