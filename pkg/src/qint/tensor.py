"""Sparse multi-index tensors over QScalar.

Indices run over 1..N.  Entries are stored in a dict keyed by index tuples and
never hold zeros.  Variance tags ('u'/'l' per slot) are carried for display and
JSON only; contractions do not look at them.
"""

from __future__ import annotations

import itertools
from collections import defaultdict

from .coeff import ONE, ZERO, QScalar, as_scalar, eval_numeric

__all__ = [
    "LabeledTensor",
    "ShapeError",
    "contract",
    "compose2",
    "add",
    "scale",
    "equal",
    "delta",
    "identity2",
    "flip2",
    "apply_pair",
    "trace_pair",
]


class ShapeError(ValueError):
    pass


class LabeledTensor:
    __slots__ = ("rank", "dim", "entries", "variance")

    def __init__(self, rank, dim, entries=None, variance=None):
        self.rank = rank
        self.dim = dim
        clean = {}
        for idx, val in (entries or {}).items():
            idx = tuple(idx)
            if len(idx) != rank or any(not 1 <= i <= dim for i in idx):
                raise ShapeError(f"index {idx} invalid for rank {rank}, dim {dim}")
            val = as_scalar(val)
            if val:
                clean[idx] = val
        self.entries = clean
        self.variance = tuple(variance) if variance else ("u",) * rank
        if len(self.variance) != rank:
            raise ShapeError("variance tags must match rank")

    @classmethod
    def _trusted(cls, rank, dim, entries, variance=None):
        obj = object.__new__(cls)
        obj.rank, obj.dim, obj.entries = rank, dim, entries
        obj.variance = tuple(variance) if variance else ("u",) * rank
        return obj

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        return self.entries.get(tuple(idx), ZERO)

    def items(self):
        return self.entries.items()

    def __len__(self):
        return len(self.entries)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return isinstance(other, LabeledTensor) and equal(self, other)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, s):
        return scale(self, s)

    __rmul__ = __mul__

    def __repr__(self):
        return f"LabeledTensor(rank={self.rank}, dim={self.dim}, nnz={len(self.entries)})"

    def scalar(self) -> QScalar:
        if self.rank != 0:
            raise ShapeError("not a rank-0 tensor")
        return self.entries.get((), ZERO)

    def permute(self, perm):
        """Slot permutation: result[idx[perm[0]], ...] = self[idx]."""
        if sorted(perm) != list(range(self.rank)):
            raise ShapeError(f"bad permutation {perm}")
        ents = {tuple(idx[p] for p in perm): v for idx, v in self.entries.items()}
        var = tuple(self.variance[p] for p in perm)
        return LabeledTensor._trusted(self.rank, self.dim, ents, var)

    def map_values(self, fn):
        ents = {}
        for idx, v in self.entries.items():
            w = fn(v)
            if w:
                ents[idx] = w
        return LabeledTensor._trusted(self.rank, self.dim, ents, self.variance)

    def evaluate(self, q0):
        """Exact rational entries at q = q0 (dict of nonzero values)."""
        out = {}
        for idx, v in self.entries.items():
            x = eval_numeric(v, q0)
            if x:
                out[idx] = x
        return out

    def to_dense(self):
        """Nested lists (rank <= 2 only), indices shifted to 0-based."""
        n = self.dim
        if self.rank == 1:
            return [self[i] for i in range(1, n + 1)]
        if self.rank == 2:
            return [[self[i, j] for j in range(1, n + 1)] for i in range(1, n + 1)]
        raise ShapeError("dense view only for rank <= 2")

    def to_json(self):
        return {
            "rank": self.rank,
            "dim": self.dim,
            "variance": "".join(self.variance),
            "entries": [
                {"idx": list(idx), "val": v.to_json()} for idx, v in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, data):
        ents = {tuple(e["idx"]): QScalar.from_json(e["val"]) for e in data["entries"]}
        var = data.get("variance") or None
        return cls(data["rank"], data["dim"], ents, tuple(var) if var else None)


def _check_dims(a, b):
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch {a.dim} != {b.dim}")


def contract(a: LabeledTensor, slot_a, b: LabeledTensor, slot_b) -> LabeledTensor:
    """Contract slot(s) ``slot_a`` of a with ``slot_b`` of b (1-based slots).

    The result carries the free slots of a followed by the free slots of b.
    """
    _check_dims(a, b)
    sa = (slot_a,) if isinstance(slot_a, int) else tuple(slot_a)
    sb = (slot_b,) if isinstance(slot_b, int) else tuple(slot_b)
    if len(sa) != len(sb):
        raise ShapeError("slot lists differ in length")
    for s, t in zip(sa, sb):
        if not 1 <= s <= a.rank or not 1 <= t <= b.rank:
            raise ShapeError(f"slot out of range: {s} / {t}")
    sa0 = [s - 1 for s in sa]
    sb0 = [t - 1 for t in sb]
    free_a = [k for k in range(a.rank) if k not in sa0]
    free_b = [k for k in range(b.rank) if k not in sb0]
    index_b = defaultdict(list)
    for idx, v in b.entries.items():
        index_b[tuple(idx[k] for k in sb0)].append((tuple(idx[k] for k in free_b), v))
    acc = defaultdict(lambda: ZERO)
    for idx, v in a.entries.items():
        key = tuple(idx[k] for k in sa0)
        rows = index_b.get(key)
        if not rows:
            continue
        head = tuple(idx[k] for k in free_a)
        for tail, w in rows:
            acc[head + tail] = acc[head + tail] + v * w
    ents = {k: v for k, v in acc.items() if v}
    var = tuple(a.variance[k] for k in free_a) + tuple(b.variance[k] for k in free_b)
    return LabeledTensor._trusted(len(free_a) + len(free_b), a.dim, ents, var)


def compose2(a: LabeledTensor, b: LabeledTensor) -> LabeledTensor:
    """(ab)^{ij}_{kl} = a^{ij}_{mn} b^{mn}_{kl} for rank-4 operators."""
    if a.rank != 4 or b.rank != 4:
        raise ShapeError("compose2 needs two rank-4 tensors")
    return contract(a, (3, 4), b, (1, 2))


def add(a: LabeledTensor, b: LabeledTensor) -> LabeledTensor:
    _check_dims(a, b)
    if a.rank != b.rank:
        raise ShapeError("rank mismatch in add")
    ents = dict(a.entries)
    for idx, v in b.entries.items():
        w = ents.get(idx, ZERO) + v
        if w:
            ents[idx] = w
        else:
            ents.pop(idx, None)
    return LabeledTensor._trusted(a.rank, a.dim, ents, a.variance)


def scale(a: LabeledTensor, s) -> LabeledTensor:
    s = as_scalar(s)
    if not s:
        return LabeledTensor._trusted(a.rank, a.dim, {}, a.variance)
    return LabeledTensor._trusted(a.rank, a.dim, {k: v * s for k, v in a.entries.items()}, a.variance)


def equal(a: LabeledTensor, b: LabeledTensor) -> bool:
    if a.rank != b.rank or a.dim != b.dim:
        raise ShapeError("shape mismatch in equal")
    return a.entries == b.entries


def first_difference(a: LabeledTensor, b: LabeledTensor):
    """Return (index, a-value, b-value) for the first differing entry, or None."""
    for idx in sorted(set(a.entries) | set(b.entries)):
        if a[idx] != b[idx]:
            return idx, a[idx], b[idx]
    return None


def delta(n: int) -> LabeledTensor:
    return LabeledTensor._trusted(2, n, {(i, i): ONE for i in range(1, n + 1)}, ("u", "l"))


def identity2(n: int) -> LabeledTensor:
    """Identity operator on the twofold slot space."""
    ents = {(i, j, i, j): ONE for i in range(1, n + 1) for j in range(1, n + 1)}
    return LabeledTensor._trusted(4, n, ents, ("u", "u", "l", "l"))


def flip2(n: int) -> LabeledTensor:
    ents = {(i, j, j, i): ONE for i in range(1, n + 1) for j in range(1, n + 1)}
    return LabeledTensor._trusted(4, n, ents, ("u", "u", "l", "l"))


def apply_pair(op: LabeledTensor, t: LabeledTensor, l: int) -> LabeledTensor:
    """Apply a rank-4 operator to slots (l, l+1) of t (1-based l)."""
    if op.rank != 4:
        raise ShapeError("operator must have rank 4")
    if not 1 <= l < t.rank:
        raise ShapeError(f"slot pair {l} out of range")
    by_in = defaultdict(list)
    for (i, j, k, m), v in op.entries.items():
        by_in[(k, m)].append((i, j, v))
    acc = defaultdict(lambda: ZERO)
    p = l - 1
    for idx, v in t.entries.items():
        for i, j, w in by_in.get((idx[p], idx[p + 1]), ()):
            key = idx[:p] + (i, j) + idx[p + 2 :]
            acc[key] = acc[key] + w * v
    ents = {k: v for k, v in acc.items() if v}
    return LabeledTensor._trusted(t.rank, t.dim, ents, t.variance)


def trace_pair(metric: LabeledTensor, t: LabeledTensor, l: int) -> LabeledTensor:
    """Contract slots (l, l+1) of t with a rank-2 metric."""
    if not 1 <= l < t.rank:
        raise ShapeError(f"slot pair {l} out of range")
    acc = defaultdict(lambda: ZERO)
    p = l - 1
    for idx, v in t.entries.items():
        w = metric.entries.get((idx[p], idx[p + 1]))
        if w is not None:
            key = idx[:p] + idx[p + 2 :]
            acc[key] = acc[key] + w * v
    ents = {k: v for k, v in acc.items() if v}
    var = t.variance[:p] + t.variance[p + 2 :]
    return LabeledTensor._trusted(t.rank - 2, t.dim, ents, var)


def all_indices(n: int, rank: int):
    return itertools.product(range(1, n + 1), repeat=rank)
