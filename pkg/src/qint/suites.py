"""Named verification suites shared by the CLI and the acceptance tests.

Each suite returns a list of CheckResult.  With ``corrupt=True`` a single
entry of one input is shifted before the suite runs (negative control):

    structure   g_lower[1, N] += 1
    rewrite     first multi-term rewrite rule, one coefficient doubled
    invariants  I_4[1, 1, N, N] += 1 before its identities are checked
    theorem1    D[1, 1] += 1 (enters the cyclic twist)
    theorem2    D[1, 1] += 1
    forms       the x^1 dx^2 rule, one coefficient doubled
    stokes      the x^1 dx^2 rule, one coefficient doubled
"""

from __future__ import annotations

import os

from .coeff import ONE, ZERO, eval_numeric
from .forms import check_cyclic_forms, check_epsilon, check_forms, check_stokes, epsilon
from .invint import (
    InvariantTensor,
    check_invariant_tensor,
    check_theorem1,
    check_theorem2,
    classical_moment,
    invariant_tensor,
    invariant_tensor_solve,
    max_degree,
)
from .ncalg import NCPoly, check_confluence, rules_for
from .soq import CheckResult, build, perturb, verify_structure

SUITES = ("structure", "rewrite", "invariants", "theorem1", "theorem2", "forms", "stokes")
# failures in these checks mean the calculus itself is inconsistent (exit code 3)
INCONSISTENCY = ("confluence", "termination")


def _corrupt_rule(rs):
    a = rs.alpha
    return rs.corrupted((a.code("x", 1), a.code("dx", 2)))


def suite_structure(N, corrupt=False, seed=0):
    from .soq import _assemble

    s = _assemble(N)
    if corrupt:
        s = perturb(s, "g_lower", (1, N), ONE)
    return verify_structure(s)


def suite_rewrite(N, corrupt=False, seed=0):
    rs = rules_for(N)
    if corrupt:
        rs = rs.corrupted()
    out = []
    bad = rs.termination_certificate()
    out.append(CheckResult("termination order", not bad, "" if not bad else f"rules {bad[:3]}"))
    for fam, rows in rs.relations.items():
        bad = None
        for row in rows:
            p = rs.normalize(NCPoly(N, row))
            if not p.is_zero():
                bad = f"{p}"
                break
        out.append(CheckResult(f"relations {fam} normalize to 0", bad is None, bad or ""))
    s = rs.s
    # dx dx: P+ dx dx = 0 and g_ij dx^i dx^j = 0
    bad = None
    for (i, j) in [(i, j) for i in range(1, N + 1) for j in range(1, N + 1)]:
        p = NCPoly(N)
        for (k, l), v in ((kl[2:], v) for kl, v in s.p_plus.items() if kl[:2] == (i, j)):
            p = p + NCPoly.dx(N, k) * NCPoly.dx(N, l) * v
        if not rs.normalize(p).is_zero():
            bad = f"P+ dx dx, ({i},{j})"
            break
    p = NCPoly(N)
    for (i, j), v in s.g_lower.items():
        p = p + NCPoly.dx(N, i) * NCPoly.dx(N, j) * v
    if bad is None and not rs.normalize(p).is_zero():
        bad = "g dx dx"
    out.append(CheckResult("P+ dx dx = 0 and g dx dx = 0", bad is None, bad or ""))
    r2 = NCPoly(N)
    for (i, j), v in s.g_lower.items():
        r2 = r2 + NCPoly.x(N, i) * NCPoly.x(N, j) * v
    ok = rs.normalize(r2) == NCPoly.r(N, 2)
    out.append(CheckResult("g x x = r^2", ok, "" if ok else str(rs.normalize(r2))))
    rep = check_confluence(rs, 3)
    wit = "" if rep.ok else f"{rep.failures[0][0]}: {rep.failures[0][1]}"
    out.append(CheckResult(f"confluence (degree 3, {rep.checked} overlaps)", rep.ok, wit))
    return out


def suite_invariants(N, corrupt=False, seed=0):
    s = build(N)
    rs = rules_for(N)
    out = []
    ranks = [2, 4] + ([6] if N == 3 else [])
    ranks = [n for n in ranks if n <= max_degree()]
    for n in ranks:
        I = invariant_tensor(s, rs, n)
        J = invariant_tensor_solve(s, n)
        lower = invariant_tensor(s, rs, n - 2)
        if corrupt and n == 4:
            bad = I.tensor.map_values(lambda v: v)
            key = (1, 1, N, N)
            bad.entries[key] = bad[key] + ONE
            I = InvariantTensor(4, bad, I.lambda_n)
        out.extend(check_invariant_tensor(s, I, lower))
        ok = I.tensor == J.tensor
        out.append(CheckResult(f"I_{n}: Laplacian route = pairing solve", ok, "" if ok else "tensors differ"))
        if n == 4:
            ok = I.tensor.evaluate(1) == classical_moment(N, 4)
            out.append(CheckResult("I_4 at q=1 = classical moments", ok, "" if ok else "mismatch"))
    Q = s.qdim
    I2 = invariant_tensor(s, rs, 2).tensor
    ok = all(I2[i, j] == v / Q for (i, j), v in s.g_upper.items()) and len(I2) == len(s.g_upper)
    out.append(CheckResult("I_2 = g / (g.g)", ok, "" if ok else "mismatch"))
    return out


def suite_theorem1(N, corrupt=False, seed=0, samples=20):
    s = build(N)
    rs = rules_for(N)
    if corrupt:
        s = perturb(s, "d_matrix", (1, 1), ONE)
    return check_theorem1(s, rs, samples=samples, seed=seed)


def suite_theorem2(N, corrupt=False, seed=0, samples=10):
    s = build(N)
    rs = rules_for(N)
    if corrupt:
        s = perturb(s, "d_matrix", (1, 1), ONE)
    return check_theorem2(s, rs, samples=samples, seed=seed)


def suite_forms(N, corrupt=False, seed=0, samples=5):
    s = build(N)
    rs = rules_for(N)
    if corrupt:
        rs = _corrupt_rule(rs)
    out = []
    eps = epsilon(s, rs, check=False)
    out.extend(check_epsilon(s, eps))
    out.extend(check_forms(s, rs, samples=samples, seed=seed))
    out.extend(check_cyclic_forms(s, rs, samples=samples, seed=seed))
    return out


def suite_stokes(N, corrupt=False, seed=0, samples=10):
    s = build(N)
    rs = rules_for(N)
    if corrupt:
        rs = _corrupt_rule(rs)
    return check_stokes(s, rs, samples=samples, seed=seed)


RUNNERS = {
    "structure": suite_structure,
    "rewrite": suite_rewrite,
    "invariants": suite_invariants,
    "theorem1": suite_theorem1,
    "theorem2": suite_theorem2,
    "forms": suite_forms,
    "stokes": suite_stokes,
}


def run_suite(name, N, corrupt=False, seed=0):
    return RUNNERS[name](N, corrupt=corrupt, seed=seed)


def is_inconsistency(check: CheckResult) -> bool:
    return any(check.name.startswith(k) for k in INCONSISTENCY)
