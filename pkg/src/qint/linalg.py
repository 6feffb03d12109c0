"""Sparse Gaussian elimination over an exact field (QScalar or Fraction)."""

from __future__ import annotations

from fractions import Fraction

from .coeff import ONE, ZERO, QScalar

__all__ = ["row_reduce", "nullspace", "det", "leading_minors"]


def _zero_like(x):
    return ZERO if isinstance(x, QScalar) else Fraction(0)


def row_reduce(rows, key=None):
    """Reduced row echelon form of sparse rows (dicts column -> value).

    Pivots are chosen as the largest column under ``key`` (default: natural
    order), so each reduced row reads ``pivot = -(rest)`` with every other
    column smaller than its pivot.  Returns a list of (pivot, row) with the
    pivot coefficient normalized to 1.
    """
    key = key or (lambda c: c)
    reduced = {}
    for row in rows:
        row = {c: v for c, v in row.items() if v}
        # eliminate existing pivots
        while row:
            hits = [c for c in row if c in reduced]
            if not hits:
                break
            c = hits[0]
            f = row[c]
            for cc, vv in reduced[c].items():
                nv = row.get(cc, _zero_like(vv)) - f * vv
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
        if not row:
            continue
        p = max(row, key=key)
        inv = 1 / row[p] if not isinstance(row[p], QScalar) else row[p].inverse()
        row = {c: v * inv for c, v in row.items()}
        # back-substitute into earlier rows
        for pc, prow in reduced.items():
            f = prow.get(p)
            if f:
                for cc, vv in row.items():
                    nv = prow.get(cc, _zero_like(vv)) - f * vv
                    if nv:
                        prow[cc] = nv
                    else:
                        prow.pop(cc, None)
        reduced[p] = row
    return sorted(reduced.items(), key=lambda t: key(t[0]), reverse=True)


def nullspace(rows, columns, key=None):
    """Basis of {v : row . v = 0 for all rows}, as dicts over ``columns``."""
    red = row_reduce(rows, key)
    pivots = {p for p, _ in red}
    free = [c for c in columns if c not in pivots]
    basis = []
    for f in free:
        vec = {f: ONE}
        for p, row in red:
            v = row.get(f)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def det(matrix):
    """Determinant of a square list-of-lists over an exact field."""
    n = len(matrix)
    if n == 0:
        return ONE
    m = [list(r) for r in matrix]
    sign = 1
    acc = None
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k]), None)
        if piv is None:
            return _zero_like(m[0][0])
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        p = m[k][k]
        acc = p if acc is None else acc * p
        inv = 1 / p
        for i in range(k + 1, n):
            f = m[i][k]
            if f:
                f = f * inv
                for j in range(k + 1, n):
                    if m[k][j]:
                        m[i][j] = m[i][j] - f * m[k][j]
    return acc * sign


def leading_minors(matrix):
    """All leading principal minors of a square matrix."""
    return [det([row[:k] for row in matrix[:k]]) for k in range(1, len(matrix) + 1)]
