"""Noncommutative polynomials over {x^i, dx^i, del^i, r, r^-1} and PBW rewriting.

Letters are small integers whose natural order is the letter order used for
normal forms::

    dx^1 < ... < dx^N < r^-1 < r < x^1 < ... < x^N < del^1 < ... < del^N

A normal word is therefore a dx-block, then a power of r, then an x-block,
then a del-block.  Words are compared by weighted degree (dx, r, r^-1 weigh
1, x weighs 2, del weighs 5) and then lexicographically; every rule strictly
decreases this order, which certifies termination.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

from .coeff import ONE, ZERO, QScalar, as_scalar, q
from .linalg import row_reduce
from .soq import SoqData, rhat_inverse

__all__ = [
    "NCPoly",
    "Alphabet",
    "RewriteSystem",
    "RewriteError",
    "ConfluenceReport",
    "derive_rules",
    "normalize",
    "check_confluence",
    "laplacian_apply",
    "conjugate",
    "substitute",
    "relation_rows",
]

KINDS = ("dx", "rinv", "r", "x", "del")
_WEIGHT = {"dx": 1, "rinv": 1, "r": 1, "x": 2, "del": 5}


class RewriteError(RuntimeError):
    """Inconsistent relations or an input outside a rewriting system's domain."""


class Alphabet:
    """Letter codes for a fixed N."""

    def __init__(self, N: int):
        self.N = N
        self.RINV = N
        self.R = N + 1
        self._kind = {}
        for i in range(1, N + 1):
            self._kind[i - 1] = ("dx", i)
            self._kind[N + 1 + i] = ("x", i)
            self._kind[2 * N + 1 + i] = ("del", i)
        self._kind[self.RINV] = ("rinv", None)
        self._kind[self.R] = ("r", None)
        self.weight = {c: _WEIGHT[k] for c, (k, _) in self._kind.items()}

    def code(self, kind: str, idx=None) -> int:
        N = self.N
        if kind in ("r", "rinv"):
            return self.R if kind == "r" else self.RINV
        if not isinstance(idx, int) or not 1 <= idx <= N:
            raise IndexError(f"index {idx} out of range 1..{N}")
        if kind == "dx":
            return idx - 1
        if kind == "x":
            return N + 1 + idx
        if kind == "del":
            return 2 * N + 1 + idx
        raise ValueError(f"unknown letter kind {kind!r}")

    def kind(self, code: int):
        return self._kind[code]

    def letters(self, kinds=KINDS):
        return [c for c in sorted(self._kind) if self._kind[c][0] in kinds]

    def key(self, word):
        return (sum(self.weight[c] for c in word), word)

    def letter_str(self, code: int) -> str:
        k, i = self._kind[code]
        if k == "r":
            return "r"
        if k == "rinv":
            return "r^-1"
        return f"{k}[{i}]"


@lru_cache(maxsize=None)
def alphabet(N: int) -> Alphabet:
    return Alphabet(N)


class NCPoly:
    """Formal QScalar-weighted sum of words (tuples of letter codes)."""

    __slots__ = ("N", "terms")

    def __init__(self, N: int, terms=None):
        self.N = N
        self.terms = {}
        for w, c in (terms or {}).items():
            c = as_scalar(c)
            if c:
                self.terms[tuple(w)] = c

    @classmethod
    def _trusted(cls, N, terms):
        obj = object.__new__(cls)
        obj.N, obj.terms = N, terms
        return obj

    # constructors ------------------------------------------------------
    @classmethod
    def const(cls, N, c=1):
        return cls(N, {(): c})

    @classmethod
    def letter(cls, N, kind, idx=None):
        return cls._trusted(N, {(alphabet(N).code(kind, idx),): ONE})

    @classmethod
    def x(cls, N, i):
        return cls.letter(N, "x", i)

    @classmethod
    def dx(cls, N, i):
        return cls.letter(N, "dx", i)

    @classmethod
    def d(cls, N, i):
        return cls.letter(N, "del", i)

    @classmethod
    def r(cls, N, power=1):
        a = alphabet(N)
        return cls._trusted(N, {(a.R if power > 0 else a.RINV,) * abs(power): ONE})

    @classmethod
    def t(cls, N, i):
        return cls.x(N, i) * cls.r(N, -1)

    # arithmetic --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, NCPoly):
            if other.N != self.N:
                raise ValueError("mixing polynomials of different N")
            return other
        return NCPoly.const(self.N, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, ZERO) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return NCPoly._trusted(self.N, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._trusted(self.N, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            s = as_scalar(other)
            if not s:
                return NCPoly._trusted(self.N, {})
            return NCPoly._trusted(self.N, {w: c * s for w, c in self.terms.items()})
        other = self._coerce(other)
        out = defaultdict(lambda: ZERO)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out[w1 + w2] = out[w1 + w2] + c1 * c2
        return NCPoly._trusted(self.N, {w: c for w, c in out.items() if c})

    def __rmul__(self, other):
        s = as_scalar(other)
        return NCPoly._trusted(self.N, {w: s * c for w, c in self.terms.items() if s})

    def __pow__(self, n: int):
        out = NCPoly.const(self.N, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.N == other.N and self.terms == other.terms
        if isinstance(other, (int, QScalar)):
            return self.terms == NCPoly.const(self.N, other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.N, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def scalar(self) -> QScalar:
        """The value of a constant polynomial."""
        if any(w for w in self.terms):
            raise ValueError("polynomial is not a constant")
        return self.terms.get((), ZERO)

    def kinds(self):
        a = alphabet(self.N)
        return {a.kind(c)[0] for w in self.terms for c in w}

    def degree_in(self, kind):
        a = alphabet(self.N)
        return max((sum(1 for c in w if a.kind(c)[0] == kind) for w in self.terms), default=0)

    def __repr__(self):
        return f"NCPoly({str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        a = alphabet(self.N)
        parts = []
        for w in sorted(self.terms, key=a.key):
            c = self.terms[w]
            word = " ".join(a.letter_str(l) for l in w)
            cs = str(c)
            if not word:
                parts.append(f"({cs})" if " " in cs else cs)
            elif c == ONE:
                parts.append(word)
            elif c == -ONE:
                parts.append(f"-{word}")
            else:
                parts.append(f"({cs}) {word}")
        return " + ".join(parts)

    def to_json(self):
        a = alphabet(self.N)
        out = []
        for w in sorted(self.terms, key=a.key):
            letters = []
            for code in w:
                k, i = a.kind(code)
                letters.append({"kind": k} if i is None else {"kind": k, "idx": i})
            out.append({"coeff": self.terms[w].to_json(), "word": letters})
        return out

    @classmethod
    def from_json(cls, N, data):
        a = alphabet(N)
        terms = {}
        for item in data:
            w = tuple(a.code(l["kind"], l.get("idx")) for l in item["word"])
            terms[w] = terms.get(w, ZERO) + QScalar.from_json(item["coeff"])
        return cls(N, terms)


# ---------------------------------------------------------------------------
# rewriting


@dataclass
class ConfluenceReport:
    ok: bool
    checked: int
    failures: list = field(default_factory=list)
    max_degree: int = 3

    def to_json(self):
        return {
            "ok": self.ok,
            "checked": self.checked,
            "max_degree": self.max_degree,
            "failures": [{"word": w, "difference": d} for w, d in self.failures],
        }


class RewriteSystem:
    """Length-2 rewrite rules (pair of letters -> {word: coeff}) for one SoqData."""

    def __init__(self, s: SoqData, rules, relations=None, constants=None):
        self.s = s
        self.N = s.N
        self.alpha = alphabet(s.N)
        self.rules = rules
        self.relations = relations or {}
        self.constants = constants or {}
        self.confluence_degree = 0
        self._memo = {}

    # -- termination ----------------------------------------------------
    def termination_certificate(self):
        """List of rules that fail to decrease the word order (empty when certified)."""
        key = self.alpha.key
        bad = []
        for lhs, rhs in self.rules.items():
            if any(key(w) >= key(lhs) for w in rhs):
                bad.append(lhs)
        return bad

    def is_normal(self, word) -> bool:
        return all((a, b) not in self.rules for a, b in zip(word, word[1:]))

    # -- normal forms ---------------------------------------------------
    def _left(self, a, w):
        """Normal form of letter a times normal word w, as dict word -> coeff."""
        key = (a, w)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        rhs = self.rules.get((a, w[0])) if w else None
        if rhs is None:
            res = {(a,) + w: ONE}
        else:
            rest = w[1:]
            acc = defaultdict(lambda: ZERO)
            for u, c in rhs.items():
                for v, d in self._concat(u, rest).items():
                    acc[v] = acc[v] + c * d
            res = {v: c for v, c in acc.items() if c}
        self._memo[key] = res
        return res

    def _concat(self, u, rest):
        """Normal form of word u times normal word rest."""
        poly = {rest: ONE}
        for letter in reversed(u):
            acc = defaultdict(lambda: ZERO)
            for w, c in poly.items():
                for v, d in self._left(letter, w).items():
                    acc[v] = acc[v] + c * d
            poly = {v: c for v, c in acc.items() if c}
        return poly

    def normalize_word(self, word):
        return self._concat(tuple(word), ())

    def normalize(self, p: NCPoly) -> NCPoly:
        if p.N != self.N:
            raise ValueError("polynomial and rewrite system have different N")
        acc = defaultdict(lambda: ZERO)
        for w, c in p.terms.items():
            for v, d in self.normalize_word(w).items():
                acc[v] = acc[v] + c * d
        return NCPoly._trusted(self.N, {v: c for v, c in acc.items() if c})

    def reduce_leftmost(self, p: NCPoly, missing_ok=False) -> NCPoly:
        """Reduce by always rewriting the leftmost reducible pair (no memo)."""
        todo = dict(p.terms)
        done = defaultdict(lambda: ZERO)
        while todo:
            w, c = todo.popitem()
            for pos in range(len(w) - 1):
                rhs = self.rules.get((w[pos], w[pos + 1]))
                if rhs is not None:
                    for u, d in rhs.items():
                        nw = w[:pos] + u + w[pos + 2 :]
                        v = todo.get(nw, ZERO) + c * d
                        if v:
                            todo[nw] = v
                        else:
                            todo.pop(nw, None)
                    break
            else:
                done[w] = done[w] + c
        return NCPoly._trusted(self.N, {v: c for v, c in done.items() if c})

    def apply_rule_at(self, word, pos):
        rhs = self.rules[(word[pos], word[pos + 1])]
        return NCPoly._trusted(self.N, {word[:pos] + u + word[pos + 2 :]: c for u, c in rhs.items()})

    def restricted(self, kinds):
        """Sub-system keeping rules whose left side uses only the given letter kinds."""
        keep = {
            lhs: rhs
            for lhs, rhs in self.rules.items()
            if all(self.alpha.kind(c)[0] in kinds for c in lhs)
        }
        out = RewriteSystem(self.s, keep, self.relations, self.constants)
        return out

    def corrupted(self, lhs=None, factor=2):
        """Copy with one rule's first coefficient rescaled (negative control)."""
        rules = dict(self.rules)
        if lhs is None:
            lhs = next(k for k, v in sorted(rules.items()) if len(v) > 1)
        rhs = dict(rules[lhs])
        w0 = sorted(rhs)[0]
        rhs[w0] = rhs[w0] * factor
        rules[lhs] = rhs
        return RewriteSystem(self.s, rules, self.relations, self.constants)


def _rows_to_rules(rows, alpha, sector):
    red = row_reduce(rows, key=alpha.key)
    rules = {}
    for pivot, row in red:
        if len(pivot) == 0:
            raise RewriteError(f"inconsistent {sector} relations: elimination gives 1 = 0")
        if len(pivot) != 2:
            raise RewriteError(f"unexpected pivot word {pivot} in {sector} relations")
        rules[pivot] = {w: -c for w, c in row.items() if w != pivot}
    return rules


def relation_rows(s: SoqData):
    """Defining relations of the calculus as sparse rows, keyed by family name."""
    N = s.N
    a = alphabet(N)
    Q = q()
    R = s.rhat
    Ri = rhat_inverse(s)
    X = lambda i: a.code("x", i)
    DX = lambda i: a.code("dx", i)
    DL = lambda i: a.code("del", i)
    rng = range(1, N + 1)
    fam = {}

    def tensor_rows(op, f1, f2, scale=ONE, extra=None, lead=None):
        rows = []
        for i in rng:
            for j in rng:
                row = defaultdict(lambda: ZERO)
                if lead is not None:
                    row[lead(i, j)] = row[lead(i, j)] + ONE
                for k in rng:
                    for l in rng:
                        v = op[i, j, k, l]
                        if v:
                            w = (f1(k), f2(l))
                            row[w] = row[w] + scale * v
                if extra is not None:
                    for w, v in extra(i, j).items():
                        row[w] = row[w] + v
                row = {w: v for w, v in row.items() if v}
                if row:
                    rows.append(row)
        return rows

    fam["x x"] = tensor_rows(s.p_minus, X, X)
    fam["r^2"] = [
        {**{(X(i), X(j)): v for (i, j), v in s.g_lower.items()}, (a.R, a.R): -ONE}
    ]
    fam["dx dx"] = tensor_rows(R, DX, DX, scale=Q, lead=lambda i, j: (DX(i), DX(j)))
    fam["x dx"] = tensor_rows(R, DX, X, scale=-Q, lead=lambda i, j: (X(i), DX(j)))
    fam["del del"] = tensor_rows(s.p_minus, DL, DL)
    fam["del x"] = tensor_rows(
        Ri, X, DL, scale=-Q, lead=lambda i, j: (DL(i), X(j)),
        extra=lambda i, j: {(): -s.g_upper[i, j]} if s.g_upper[i, j] else {},
    )
    fam["del dx"] = tensor_rows(R, DX, DL, scale=-(Q ** -1), lead=lambda i, j: (DL(i), DX(j)))
    rows = []
    for i in rng:
        rows.append({(X(i), a.R): ONE, (a.R, X(i)): -ONE})
        rows.append({(X(i), a.RINV): ONE, (a.RINV, X(i)): -ONE})
        rows.append({(a.R, DX(i)): ONE, (DX(i), a.R): -Q})
        rows.append({(a.RINV, DX(i)): ONE, (DX(i), a.RINV): -(Q ** -1)})
    rows.append({(a.R, a.RINV): ONE, (): -ONE})
    rows.append({(a.RINV, a.R): ONE, (): -ONE})
    fam["r"] = rows
    return fam


def derive_rules(s: SoqData) -> RewriteSystem:
    """Derive the PBW rewrite rules of the calculus by linear elimination."""
    N = s.N
    a = alphabet(N)
    fam = relation_rows(s)
    rules = {}
    rules.update(_rows_to_rules(fam["x x"] + fam["r^2"], a, "x x"))
    expected = N * (N - 1) // 2 + 1
    if len(rules) != expected:
        raise RewriteError(f"x-sector elimination gave {len(rules)} rules, expected {expected}")
    for name in ("dx dx", "x dx", "del del", "del x", "del dx"):
        rules.update(_rows_to_rules(fam[name], a, name))
    for row in fam["r"]:
        rules.update(_rows_to_rules([row], a, "r"))
    rs = RewriteSystem(s, rules, fam)

    # del r: from del^i r^2 = alpha^i_j x^j + beta r^2 del^i, with r del = q del r
    Q = q()
    const = {}
    for i in range(1, N + 1):
        probe = NCPoly._trusted(N, {(a.code("del", i), a.code("x", j), a.code("x", k)): v
                                    for (j, k), v in s.g_lower.items()})
        out = rs.reduce_leftmost(probe)
        alpha_i, beta = {}, None
        for w, c in out.terms.items():
            if len(w) == 1 and a.kind(w[0])[0] == "x":
                alpha_i[a.kind(w[0])[1]] = c
            elif w == (a.R, a.R, a.code("del", i)):
                beta = c
            else:
                raise RewriteError(f"del r^2 has unexpected term {w}")
        if beta != Q**2:
            raise RewriteError(f"del r^2 = ... + {beta} r^2 del, expected q^2")
        const[i] = {j: v / (1 + Q) for j, v in alpha_i.items()}
    for i in range(1, N + 1):
        di = a.code("del", i)
        rhs = {(a.R, di): Q}
        for j, v in const[i].items():
            rhs[(a.code("x", j), a.RINV)] = v
        rules[(di, a.R)] = rhs
        rhs = {(a.RINV, di): Q ** -1}
        for j, v in const[i].items():
            rhs[(a.code("x", j), a.RINV, a.RINV, a.RINV)] = -v * Q ** -1
        rules[(di, a.RINV)] = rhs
    rs = RewriteSystem(s, rules, fam, {"del r": const})
    bad = rs.termination_certificate()
    if bad:
        raise RewriteError(f"rules do not decrease the word order: {bad}")
    return rs


@lru_cache(maxsize=None)
def rules_for(N: int) -> RewriteSystem:
    from .soq import build

    return derive_rules(build(N))


def normalize(p: NCPoly, rs: RewriteSystem) -> NCPoly:
    return rs.normalize(p)


def check_confluence(rs: RewriteSystem, max_deg: int = 3, kinds=None) -> ConfluenceReport:
    """Resolve every overlap a b c of two rule left sides (diamond lemma).

    ``kinds`` limits the check to overlaps built from those letter kinds
    ('r' covers r and r^-1).  For max_deg > 3 every word of length up to
    max_deg over the letters is additionally normalized by two strategies.
    """
    if max_deg < 3:
        raise ValueError("max_deg must be >= 3")
    a = rs.alpha
    if kinds is None:
        allowed = set(KINDS)
    else:
        allowed = set(kinds)
        if "r" in allowed:
            allowed.add("rinv")
    letters = a.letters(tuple(allowed))
    by_first = defaultdict(list)
    for (u, v) in rs.rules:
        by_first[u].append(v)
    failures = []
    checked = 0
    for (x1, x2) in sorted(rs.rules):
        if x1 not in letters or x2 not in letters:
            continue
        for x3 in by_first.get(x2, ()):
            if x3 not in letters:
                continue
            w = (x1, x2, x3)
            left = rs.normalize(rs.apply_rule_at(w, 0))
            right = rs.normalize(rs.apply_rule_at(w, 1))
            checked += 1
            if left != right:
                failures.append((" ".join(a.letter_str(c) for c in w), str(left - right)))
    if max_deg > 3:
        for n in range(2, max_deg + 1):
            for w in itertools.product(letters, repeat=n):
                p = NCPoly._trusted(rs.N, {w: ONE})
                u, v = rs.normalize(p), rs.reduce_leftmost(p)
                checked += 1
                if u != v:
                    failures.append((" ".join(a.letter_str(c) for c in w), str(u - v)))
    if not failures:
        rs.confluence_degree = max(rs.confluence_degree, max_deg)
    return ConfluenceReport(not failures, checked, failures, max_deg)


# ---------------------------------------------------------------------------
# operations on the function sector


def _function_part(rs, poly_terms):
    a = rs.alpha
    return {w: c for w, c in poly_terms.items() if not any(a.kind(l)[0] == "del" for l in w)}


def derivative_action(rs: RewriteSystem, i: int, word) -> dict:
    """Function part of normal_form(del^i word) for a normal function word."""
    key = ("act", i, word)
    hit = rs._memo.get(key)
    if hit is None:
        hit = _function_part(rs, rs._left(rs.alpha.code("del", i), word))
        rs._memo[key] = hit
    return hit


def laplacian_word(rs: RewriteSystem, word) -> dict:
    key = ("lap", word)
    hit = rs._memo.get(key)
    if hit is not None:
        return hit
    s = rs.s
    acc = defaultdict(lambda: ZERO)
    for (i, j), gij in s.g_lower.items():
        for w1, c1 in derivative_action(rs, j, word).items():
            for w2, c2 in derivative_action(rs, i, w1).items():
                acc[w2] = acc[w2] + gij * c1 * c2
    hit = {w: c for w, c in acc.items() if c}
    rs._memo[key] = hit
    return hit


def laplacian_apply(p: NCPoly, s: SoqData, rs: RewriteSystem) -> NCPoly:
    """Action of g_ij del^i del^j on a function, with del acting trivially on 1."""
    kinds = p.kinds()
    if kinds & {"dx", "del"}:
        raise RewriteError("laplacian_apply takes functions of x and r only")
    p = rs.normalize(p)
    acc = defaultdict(lambda: ZERO)
    for w, c in p.terms.items():
        for v, d in laplacian_word(rs, w).items():
            acc[v] = acc[v] + c * d
    return NCPoly._trusted(p.N, {v: c for v, c in acc.items() if c})


def conjugate(p: NCPoly, s: SoqData) -> NCPoly:
    """Star involution on the function sector: reverse words, x^i -> x^j g_ji."""
    a = alphabet(p.N)
    if p.kinds() & {"dx", "del"}:
        raise RewriteError("conjugation is defined on the function sector only")
    out = NCPoly(p.N)
    for w, c in p.terms.items():
        term = NCPoly.const(p.N, c)
        for code in reversed(w):
            k, i = a.kind(code)
            if k == "x":
                img = NCPoly(p.N, {(a.code("x", j),): s.g_lower[j, i] for j in range(1, p.N + 1)})
            else:
                img = NCPoly._trusted(p.N, {(code,): ONE})
            term = term * img
        out = out + term
    return out


def substitute(p: NCPoly, s: SoqData, scale_power: int = 0, twist: bool = False) -> NCPoly:
    """Linear substitution x -> q^k D x (dx likewise), r -> q^k r.

    ``scale_power`` is k; ``twist`` applies the diagonal D-matrix to x and
    dx and leaves r fixed.
    """
    a = alphabet(p.N)
    if "del" in p.kinds():
        raise RewriteError("substitution is defined on x, dx and r letters")
    Q = q()
    lam = Q**scale_power
    for (i, j) in s.d_matrix.entries:
        if i != j:
            raise RewriteError("D-twist needs a diagonal D-matrix")
    factor = {}
    for code in a.letters():
        k, i = a.kind(code)
        f = ONE
        if k in ("x", "dx"):
            f = lam * (s.d_matrix[i, i] if twist else ONE)
        elif k == "r":
            f = lam
        elif k == "rinv":
            f = lam.inverse()
        factor[code] = f
    out = {}
    for w, c in p.terms.items():
        for code in w:
            c = c * factor[code]
        out[w] = c
    return NCPoly(p.N, out)
