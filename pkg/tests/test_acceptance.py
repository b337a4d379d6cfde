"""Acceptance suite: the eight exit criteria, one pass/fail line each.

Every tolerance is pinned here; nothing is deferred to calibration.  Run
with ``pytest tests/test_acceptance.py -v -s`` to see the summary lines.
"""

import random
import time

import pytest

from approxlie import expr as ex
from approxlie import normal
from approxlie.creeping import (X, Y, ansatz_case, constraint_expr,
                                constraint_residual, creeping_system,
                                paper_generators)
from approxlie.invariance import (determining_equations, invariance_residual,
                                  onshell_rules, verify_generator)
from approxlie.lie import Generator, commutator
from approxlie.numeric import SamplePlan, eps_sweep, fd_check
from approxlie.solutions import (DEFAULT_REGION, FAMILY_IDS, catalog_family,
                                 check_bvp, check_reduced_system)

from conftest import random_expr


def report(criterion: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def sys_rules():
    system = creeping_system()
    return system, onshell_rules(system, 1)


def test_criterion_1_symmetry_verification(sys_rules):
    """All nine generators pass first-order approximate invariance, xi9
    verified modulo the constraint and for each ansatz case; < 120 s."""
    system, rules = sys_rules
    t0 = time.time()
    gens = paper_generators()
    failures = []
    for name in [f"xi{i}" for i in range(1, 9)]:
        if not verify_generator(system, gens[name], rules=rules).passed:
            failures.append(name)
    rules9 = onshell_rules(system, 1, modulo=[constraint_expr()])
    if not verify_generator(system, gens["xi9"], rules=rules9).passed:
        failures.append("xi9(modulo)")
    for cid in ("i", "ii", "iii"):
        case = ansatz_case(cid)
        g9 = paper_generators(case.f1, case.f2)["xi9"]
        if not verify_generator(system, g9, rules=rules).passed:
            failures.append(f"xi9(case {cid})")
    elapsed = time.time() - t0
    report("1 (symmetry verification)",
           not failures and elapsed < 120,
           f"9 generators + xi9 per case in {elapsed:.1f}s"
           + (f"; failures: {failures}" if failures else ""))


def test_criterion_2_constraint():
    """Constraint residual is exactly zero for the three ansatz cases with
    fully symbolic coefficients; < 5 s."""
    t0 = time.time()
    ok = True
    for cid in ("i", "ii", "iii"):
        case = ansatz_case(cid)
        ok = ok and constraint_residual(case.f1, case.f2) is ex.ZERO
    elapsed = time.time() - t0
    report("2 (constraint)", ok and elapsed < 5, f"{elapsed:.2f}s")


def test_criterion_3_solution_residuals(sys_rules):
    """Each family substituted into the system leaves symbolically-zero
    order-0/1 coefficients, or the exact survivors are reported and a
    repaired family passes; < 10 min."""
    system, _ = sys_rules
    t0 = time.time()
    details = []
    ok = True
    for fid in FAMILY_IDS:
        fam, rep = catalog_family(fid, system=system)
        ok = ok and rep.passed and not rep.symbolic_residuals
        if fam.repair_note:
            # a repair happened: the exact survivors must be on record and
            # the repaired family must re-verify cleanly
            from approxlie.solutions import check_full_residual
            re_rep, _ = check_full_residual(fam, system, repair=False)
            ok = ok and re_rep.passed and "original form" in rep.details
            details.append(f"{fid}: repaired (survivors reported verbatim)")
        else:
            details.append(f"{fid}: verbatim")
    elapsed = time.time() - t0
    report("3 (solution residuals)", ok and elapsed < 600,
           "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_4_reduced_systems(sys_rules):
    """Extracted profiles satisfy the reduced ODE systems symbolically
    (translation cases ii/iii with alpha = beta = 0); < 60 s."""
    system, _ = sys_rules
    t0 = time.time()
    ok = True
    for fid in ("scale_i", "trasl_i", "trasl_ii", "trasl_iii"):
        fam, _ = catalog_family(fid, system=system)
        ok = ok and check_reduced_system(fam).passed
    elapsed = time.time() - t0
    report("4 (reduced systems)", ok and elapsed < 60, f"{elapsed:.1f}s")


def test_criterion_5_bvp(sys_rules):
    """Mud-flow boundary conditions hold exactly at order zero and eps = 0
    recovers the unperturbed solution; < 5 s."""
    system, _ = sys_rules
    t0 = time.time()
    fam, _ = catalog_family("bvp_mud", system=system)
    rep = check_bvp(fam)
    elapsed = time.time() - t0
    report("5 (boundary value problem)", rep.passed and elapsed < 5,
           f"{elapsed:.2f}s")


def test_criterion_6_numeric_order(sys_rules):
    """Sweep slope in [1.95, 2.05] for every family on the standard grid
    and 64 default-box points; eps^0-truncated control in [0.95, 1.05]
    (exact-control families report EXACT); < 30 s."""
    system, _ = sys_rules
    t0 = time.time()
    eps_list = [1e-1, 1e-2, 1e-3, 1e-4]
    rows = []
    ok = True
    for fid in FAMILY_IDS:
        fam, _ = catalog_family(fid, system=system)
        plan = SamplePlan(region=DEFAULT_REGION[fid], count=64, seed=42)
        res = eps_sweep(fam, system, eps_list, plan)
        ctl = eps_sweep(fam, system, eps_list, plan, control=True)
        slope_ok = res.slope is not None and 1.95 <= res.slope <= 2.05
        ctl_ok = ctl.status == "EXACT" or (
            ctl.slope is not None and 0.95 <= ctl.slope <= 1.05)
        ok = ok and slope_ok and ctl_ok
        rows.append(f"{fid}: {res.slope:.3f}/"
                    f"{'EXACT' if ctl.status == 'EXACT' else f'{ctl.slope:.2f}'}")
    elapsed = time.time() - t0
    report("6 (numeric order check)", ok and elapsed < 30,
           "; ".join(rows) + f"; {elapsed:.1f}s")


def test_criterion_7_structural_properties(sys_rules):
    """Stable symmetries, eps-closure, commutator closure, and full
    mutation sensitivity (50/50 rejected)."""
    system, rules = sys_rules
    gens = paper_generators()
    ok = True
    notes = []

    sys0 = system.at_zero()
    rules0 = onshell_rules(sys0, 0)
    stable = all(
        verify_generator(sys0, gens[n].order_zero_part(), rules=rules0,
                         numeric_guard=False).passed
        for n in ("xi1", "xi2", "xi3", "xi8"))
    ok = ok and stable
    notes.append(f"stable={stable}")

    closure_eps = all(
        verify_generator(system, gens[n].shift_eps(), rules=rules,
                         numeric_guard=False).passed
        for n in [f"xi{i}" for i in range(1, 9)])
    ok = ok and closure_eps
    notes.append(f"eps-closure={closure_eps}")

    case = ansatz_case("i")
    cgens = paper_generators(case.f1, case.f2)
    names = list(cgens)
    bracket_ok = True
    checked = 0
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            br = commutator(cgens[names[i]], cgens[names[j]])
            if br.is_zero():
                continue
            checked += 1
            if not verify_generator(system, br, rules=rules,
                                    numeric_guard=False).passed:
                bracket_ok = False
    ok = ok and bracket_ok and checked >= 5
    notes.append(f"commutator closure over {checked} nonzero brackets")

    rng = random.Random(2024)
    caught = 0
    for _ in range(50):
        g = gens[rng.choice(["xi6", "xi7", "xi8"])]
        slots = [(kind, key, k)
                 for kind, table in (("xi", g.xi), ("eta", g.eta))
                 for key, ss in table.items()
                 for k, s in enumerate(ss) if s is not ex.ZERO]
        kind, key, k = rng.choice(slots)
        table = dict(g.xi if kind == "xi" else g.eta)
        ss = list(table[key])
        ss[k] = ex.mul(ex.rat(rng.choice([2, 3, 5, 7])), ss[k])
        table[key] = tuple(ss)
        bad = Generator(g.scheme, g.order,
                        table if kind == "xi" else g.xi,
                        g.eta if kind == "xi" else table, "mutant")
        det = determining_equations(
            invariance_residual(system, bad, 1, rules=rules), system)
        caught += (not det.empty)
    ok = ok and caught == 50
    notes.append(f"mutations rejected {caught}/50")

    report("7 (structural properties)", ok, "; ".join(notes))


def test_criterion_8_kernel_oracles(sys_rules):
    """Derivative-vs-finite-difference relative error < 1e-6 on every
    expression class used; Clairaut and product-rule pass on 1000
    randomized expressions."""
    system, _ = sys_rules
    rng = random.Random(77)
    fd_ok = True
    for fid in FAMILY_IDS:
        fam, _ = catalog_family(fid, system=system)
        comps = fam.components()
        jets = {s for eq in system.equations for s in ex.jet_symbols(eq)
                if s.func.name in comps and s.order >= 1}
        pts = []
        while len(pts) < 20:
            x = rng.uniform(*DEFAULT_REGION[fid][0])
            y = rng.uniform(*DEFAULT_REGION[fid][1])
            if fam.locus_ok(x, y, margin=0.05):
                pts.append((x, y))
        for s in sorted(jets, key=lambda t: t.name):
            e = comps[s.func.name]
            idx = list(s.index)
            var = X if idx[0] > 0 else Y
            idx[0 if idx[0] > 0 else 1] -= 1
            for v, cnt in zip((X, Y), idx):
                for _ in range(cnt):
                    e = ex.diff(e, v)
            for (x, y) in pts:
                point = dict(fam.numeric_params)
                point.update({"x": x, "y": y, "eps": 0.01})
                if fd_check(e, var, point, h=1e-5) >= 1e-6:
                    fd_ok = False

    prop_rng = random.Random(424242)
    clairaut_fail = product_fail = 0
    for _ in range(1000):
        e = random_expr(prop_rng, depth=2)
        f = random_expr(prop_rng, depth=2)
        if not normal.is_zero(ex.sub(ex.diff(ex.diff(e, X), Y),
                                     ex.diff(ex.diff(e, Y), X))):
            clairaut_fail += 1
        lhs = ex.diff(ex.mul(e, f), X)
        rhs = ex.add(ex.mul(ex.diff(e, X), f), ex.mul(e, ex.diff(f, X)))
        if not normal.is_zero(ex.sub(lhs, rhs)):
            product_fail += 1
    report("8 (kernel oracles)",
           fd_ok and clairaut_fail == 0 and product_fail == 0,
           f"fd<1e-6 on all equation jets x 20 points x 5 families; "
           f"clairaut failures {clairaut_fail}/1000, "
           f"product-rule failures {product_fail}/1000")
