"""Acceptance criteria 1-9, each with its time budget.

Every test appends one PASS/FAIL line to the terminal summary; running this
file directly prints the same lines.
"""

import random
import time
from fractions import Fraction

import pytest

from qint.cli import run_verify
from qint.forms import check_epsilon, check_stokes, epsilon, random_form, stokes_annulus
from qint.ncalg import NCPoly, check_confluence, derive_rules, rules_for
from qint.radial import RadialFunctional, RadialProfile
from qint.soq import build
from qint.suites import SUITES, suite_invariants, suite_structure, suite_theorem1, suite_theorem2

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = []


def _report(num, title, checks, elapsed, budget):
    failed = [c for c in checks if not c.passed]
    ok = not failed and elapsed < budget
    why = ""
    if failed:
        why = " failed: " + "; ".join(f"{c.name} ({c.witness})" if c.witness else c.name for c in failed[:3])
    elif elapsed >= budget:
        why = f" over budget ({elapsed:.1f}s >= {budget}s)"
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} ({elapsed:.2f}s / {budget}s){why}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failed, why
    assert elapsed < budget, why


class _Check:
    def __init__(self, name, passed, witness=""):
        self.name, self.passed, self.witness = name, passed, witness


def _tagged(N, checks):
    return [_Check(f"N={N}: {c.name}", c.passed, c.witness) for c in checks]


def test_criterion_1_structure():
    t = time.perf_counter()
    checks = []
    for N in range(3, 8):
        checks += _tagged(N, suite_structure(N))
    _report(1, "structure suite N=3..7", checks, time.perf_counter() - t, 60)


def test_criterion_2_rewrite():
    t = time.perf_counter()
    checks = []
    for N in (3, 4, 5):
        rs = derive_rules(build(N))
        bad = rs.termination_certificate()
        checks.append(_Check(f"N={N}: rules derived and terminating", not bad, str(bad[:2])))
        for fam, rows in rs.relations.items():
            nz = [r for r in rows if not rs.normalize(NCPoly(N, r)).is_zero()]
            checks.append(_Check(f"N={N}: relations {fam} normalize to 0", not nz))
    rep = check_confluence(rules_for(3), 3)
    checks.append(_Check(f"N=3: degree-3 confluence, full alphabet ({rep.checked} overlaps)", rep.ok and rep.checked > 0,
                         str(rep.failures[:1])))
    rep = check_confluence(rules_for(4), 3, kinds=("x", "dx"))
    checks.append(_Check(f"N=4: degree-3 confluence, x/dx sectors ({rep.checked} overlaps)", rep.ok and rep.checked > 0,
                         str(rep.failures[:1])))
    _report(2, "rewrite suite", checks, time.perf_counter() - t, 300)


def test_criterion_3_invariants():
    t = time.perf_counter()
    checks = []
    for N in (3, 4, 5):
        res = suite_invariants(N)
        names = {c.name for c in res}
        want = {"I_2: Laplacian route = pairing solve", "I_4: Laplacian route = pairing solve",
                "I_2 cyclic", "I_4 cyclic", "I_4 at q=1 = classical moments"}
        if N == 3:
            want |= {"I_6: Laplacian route = pairing solve", "I_6 cyclic"}
        checks.append(_Check(f"N={N}: required identities present", want <= names, str(want - names)))
        checks += _tagged(N, res)
    _report(3, "invariant tensors (I_2, I_4 for N=3,4,5; I_6 for N=3)", checks, time.perf_counter() - t, 600)


def test_criterion_4_theorem1():
    t = time.perf_counter()
    res = suite_theorem1(3, samples=20)
    names = {c.name for c in res}
    want = {"sphere reality", "sphere cyclic", "Gram minors >= 0 at q=4/5", "Gram minors >= 0 at q=1",
            "Gram minors >= 0 at q=5/4"}
    checks = [_Check("required identities present", want <= names, str(want - names))] + res
    _report(4, "theorem1 suite: sphere reality, cyclic, Gram positivity, N=3", checks, time.perf_counter() - t, 300)


def test_criterion_5_theorem2():
    t = time.perf_counter()
    res = suite_theorem2(3, samples=10)
    names = {c.name for c in res}
    checks = [_Check("required identities present", {"euclid scaling", "euclid cyclic"} <= names)] + res
    _report(5, "theorem2 suite: Euclidean scaling and cyclic, N=3", checks, time.perf_counter() - t, 120)


def test_criterion_6_epsilon():
    t = time.perf_counter()
    checks = []
    for N in (3, 4, 5):
        s = build(N)
        checks += _tagged(N, check_epsilon(s, epsilon(s, rules_for(N), check=False)))
    _report(6, "epsilon suite N=3,4,5", checks, time.perf_counter() - t, 300)


def test_criterion_7_stokes():
    t = time.perf_counter()
    N = 3
    s, rs = build(N), rules_for(N)
    checks = list(check_stokes(s, rs, samples=10, seed=0, max_window=8))
    # the full width l - k = 8 on 10 further seeded forms
    rng = random.Random(8)
    bad = None
    for k in range(10):
        alpha = random_form(rs, N - 1, rng, tdeg=3, profile="mixed")
        lo = rng.randint(-4, 0)
        res = stokes_annulus(alpha, lo, lo + 8)
        if not res.passed and bad is None:
            bad = f"sample {k}: {res.witness}"
    checks.append(_Check("annulus Stokes at l-k = 8", bad is None, bad or ""))
    names = {c.name for c in checks}
    want = {"space Stokes", "sphere Stokes", "annulus Stokes", "annulus saturates to space"}
    checks.append(_Check("required identities present", want <= names, str(want - names)))
    _report(7, "Stokes suite N=3 (space, sphere, annulus, saturation)", checks, time.perf_counter() - t, 600)


def test_criterion_8_riemann():
    t = time.perf_counter()
    q0 = Fraction(1001, 1000)
    l = 693  # q0^l = 1.9990...
    approx = RadialFunctional.finite_window(0, l).integrate(RadialProfile.power(2)).evaluate(q0, 1)
    exact = (q0 ** (2 * l) - 1) / 2  # integral of r^2 dr/r over [1, q0^l]
    rel = abs(approx - exact) / exact
    checks = [_Check(f"relative error {float(rel):.2e} < 1%", rel < Fraction(1, 100))]
    _report(8, "finite-window Riemann sum vs closed form", checks, time.perf_counter() - t, 1)


def test_criterion_9_negative_controls():
    t = time.perf_counter()
    checks = []
    for name in SUITES:
        code, report = run_verify([3], [name], seed=0, corrupt=True)
        failed = report["results"][0]["failed"]
        checks.append(_Check(f"{name}: corruption detected (exit {code}, {', '.join(failed[:2])})",
                             code != 0 and bool(failed)))
        code, _ = run_verify([3], [name], seed=0)
        checks.append(_Check(f"{name}: clean run passes", code == 0))
    _report(9, "negative controls for every suite", checks, time.perf_counter() - t, 300)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
