"""Acceptance criteria, one printed PASS/FAIL line each.

Run alone with `pytest tests/test_acceptance.py -v` or `python3 tests/test_acceptance.py`; the lines are
repeated in an "acceptance criteria" section at the end of any pytest run that includes this module.
"""
import random
import sys
import time

import pytest

from krpoly.charformula import character
from krpoly.groupring import GeoFraction, GroupRingElem
from krpoly.polyform import PolyhedralSpec, partial_fractions_row, resum_identity
from krpoly.qsystem import (PoleSpec, QSystem, check_linear_recurrence, coeff_C1, coeff_C2, lambda_table,
                            mukhin_young, residue_from_series)
from krpoly.rootsys import Weight, build_root_system
from krpoly.verifier import (CONSISTENT, FAILED, PROVED, VerifierConfig, check_qsystem_closed_form, check_recurrence,
                             check_residue, check_terms, negative_control_spec, run_pipeline)
from krpoly.weylgrp import weyl_group

BUDGET_FULL_VERIFY = 1450.0
BUDGET_COUNTS = 5.0
BUDGET_CROSS = 60.0
BUDGET_TERMS = 600.0

_lines = []


def report(n, ok, detail, elapsed=None, budget=None):
    timing = ""
    if elapsed is not None:
        timing = f" [{elapsed:.1f}s" + (f" / budget {budget:.0f}s]" if budget else "]")
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}{timing}"
    _lines.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def f4_node2_exact(tmp_path_factory):
    cache = tmp_path_factory.mktemp("chars")
    t0 = time.perf_counter()
    rep = run_pipeline(VerifierConfig(ctype="F4", node=2, mode="exact", max_term_check=3, cache_dir=str(cache)))
    return rep, time.perf_counter() - t0, cache


def test_criterion1_main_verification(f4_node2_exact):
    rep, elapsed, _ = f4_node2_exact
    residues = ["residue:0,0,0,0", "residue:1,0,0,0", "residue:0,1,0,0", "residue:0,0,0,2"]
    vanish = ["vanishing:0,0,2,0", "vanishing:0,1,0,0", "vanishing:1,0,0,0"]
    res_ok = all(rep.check(n).status == PROVED for n in residues)
    van_ok = all(rep.check(n).status == PROVED for n in vanish)
    pairing = rep.check("vanishing:1,0,0,0").witnesses
    pair_ok = pairing.get("route") == "pairing" and pairing.get("coset_count") == 12 and len(pairing["pairs"]) == 6
    ok = rep.status == PROVED and res_ok and van_ok and pair_ok and elapsed <= BUDGET_FULL_VERIFY
    report(1, ok, f"F4 node 2 exact: status={rep.status}, 4 residues proved={res_ok}, "
                  f"3 vanishing certificates={van_ok}, omega1 pairing {len(pairing.get('pairs', []))} pairs "
                  f"of {pairing.get('coset_count')} cosets", elapsed, BUDGET_FULL_VERIFY)
    assert ok


def test_criterion2_structural_counts():
    t0 = time.perf_counter()
    F4 = build_root_system("F4")
    W = weyl_group(F4)
    order = W.order
    orbit = len(W.orbit(F4.fundamental(1)))
    w134 = len(W.min_coset_reps({1, 3, 4}))
    wpp = len(W.min_coset_reps({2, 4}, {2, 3, 4}))
    elapsed = time.perf_counter() - t0
    ok = (order, orbit, w134, wpp) == (1152, 24, 96, 12) and elapsed <= BUDGET_COUNTS
    report(2, ok, f"|W|={order}, |O(w1)|={orbit}, |W^(1,3,4)|={w134}, |W''|={wpp}", elapsed, BUDGET_COUNTS)
    assert ok


def test_criterion3_cross_route_residues():
    t0 = time.perf_counter()
    done = []
    for name in ("A1", "A2", "C2"):
        R = build_root_system(name)
        for a in R.nodes:
            tab = lambda_table(R, a)
            series = QSystem(R).series(a, tab.degree(R))
            got = residue_from_series(series, tab, PoleSpec(R.fundamental(a)), R).value
            done.append((f"{name}/{a}", got == mukhin_young(R, a)))
    elapsed = time.perf_counter() - t0
    ok = all(v for _, v in done) and elapsed <= BUDGET_CROSS
    report(3, ok, "series residue = product formula at omega_a: "
                  + ", ".join(f"{k} {'ok' if v else 'DIFF'}" for k, v in done), elapsed, BUDGET_CROSS)
    assert ok


def test_criterion4_term_by_term(f4_node2_exact):
    _, _, cache = f4_node2_exact
    from krpoly.charformula import use_store
    from krpoly.cache import DiskCharacterStore
    prev = use_store(DiskCharacterStore(cache))
    try:
        t0 = time.perf_counter()
        F4 = build_root_system("F4")
        spec = PolyhedralSpec.load()
        s2, w2 = check_terms(spec, F4, 2, 3, "exact", 1, 3)
        s1, w1 = check_qsystem_closed_form(F4, 1, 6)
        elapsed = time.perf_counter() - t0
    finally:
        use_store(prev)
    ok = s2 == PROVED and s1 == PROVED and elapsed <= BUDGET_TERMS
    report(4, ok, f"Q2_m = P2_m for m <= {w2['max_m']}: {s2}; coupled Q-system Q1_m = closed sum "
                  f"for m <= {w1['max_m']}: {s1}", elapsed, BUDGET_TERMS)
    assert ok


def test_criterion5_recurrences():
    t0 = time.perf_counter()
    F4 = build_root_system("F4")
    s, w = check_recurrence(F4, 1, lambda_table(F4, 1), 5)
    A1 = build_root_system("A1")
    tab = lambda_table(A1, 1)
    rep = check_linear_recurrence(QSystem(A1).series(1, tab.degree(A1) + 10), tab, 10, A1)
    numer_one = rep.numerator[0] == GroupRingElem.one(1) and all(n.is_zero() for n in rep.numerator[1:])
    elapsed = time.perf_counter() - t0
    ok = s == PROVED and w["degree"] == 25 and len(w["vanishing_indices"]) == 6 and numer_one
    report(5, ok, f"F4 node 1 annihilated by degree-{w['degree']} denominator "
                  f"(indices {w['vanishing_indices'][0]}..{w['vanishing_indices'][-1]} vanish exactly); "
                  f"A1 numerator is 1: {numer_one}", elapsed)
    assert ok


def _w_invariant(W, R, f):
    return all(f.weyl_act(W.from_word((a,))) == f for a in R.nodes)


def test_criterion6_properties():
    t0 = time.perf_counter()
    rng = random.Random(20)
    results = {}
    F4 = build_root_system("F4")
    W = weyl_group(F4)
    chars_ok = True
    for name in ("A1", "A2", "C2", "F4"):
        R = build_root_system(name)
        WR = weyl_group(R)
        for lam in [R.fundamental(a) for a in R.nodes] + [R.fundamental(R.nodes[0]) * 2]:
            chars_ok &= _w_invariant(WR, R, character(R, lam).value)
    results["characters W-invariant"] = chars_ok
    coeff_ok = True
    for lam in (Weight((0, 1, 0, 0)), Weight((0, 0, 0, 2))):
        c = coeff_C2(F4, lam).value
        coeff_ok &= all(c.weyl_act(W.from_word((a,))) == c for a in W.stabilizer_nodes(lam))
    fund = coeff_C1(F4, F4.fundamental(1))
    for _ in range(5):
        w = rng.choice(W.elements())
        coeff_ok &= fund.weyl_act(w) == coeff_C1(F4, w.apply(F4.fundamental(1)))
    results["coefficients equivariant"] = coeff_ok
    spec = PolyhedralSpec.load()
    els = W.elements()
    results["20 re-sum identities"] = all(resum_identity(spec, partial_fractions_row(spec, rng.choice(els)))
                                          for _ in range(20))
    norm_ok = True
    for _ in range(20):
        num = GroupRingElem.from_weights(2, [(Weight((rng.randint(-3, 3), rng.randint(-3, 3))), rng.randint(-4, 4))
                                             for _ in range(4)])
        dens = [Weight((rng.randint(-2, 2), rng.randint(1, 2))) for _ in range(rng.randint(0, 3))]
        extra = Weight((rng.randint(-2, 2), 1))
        x = GeoFraction.build(num, dens)
        y = GeoFraction.build(num * (GroupRingElem.one(2) - GroupRingElem.monomial(extra)), dens + [extra])
        n1 = x.normalized()
        norm_ok &= n1.normalized().num == n1.num and n1.normalized().den == n1.den and y.normalized() == n1
    results["normalization idempotent"] = norm_ok
    agree = True
    for name, nodes in (("A1", (1,)), ("A2", (1, 2)), ("C2", (1, 2))):
        for a in nodes:
            ex = run_pipeline(VerifierConfig(ctype=name, node=a, mode="exact"))
            pr = run_pipeline(VerifierConfig(ctype=name, node=a, mode="prob"))
            agree &= ex.status == PROVED and pr.status == CONSISTENT
            agree &= {c.name for c in ex.checks} == {c.name for c in pr.checks}
    d = spec.to_dict()
    for coords in ((0, 1, 0, 0), (0, 0, 0, 2)):
        agree &= check_residue(d, 2, coords, "exact", 1, 3).status == PROVED
        agree &= check_residue(d, 2, coords, "prob", 1, 3).status == CONSISTENT
    results["prob/exact agreement"] = agree
    elapsed = time.perf_counter() - t0
    ok = all(results.values())
    report(6, ok, "; ".join(f"{k}: {'ok' if v else 'FAIL'}" for k, v in results.items()), elapsed)
    assert ok


def test_criterion7_negative_controls():
    t0 = time.perf_counter()
    summary = []
    ok = True
    for kind in ("drop-j4-factor", "shift-min", "drop-square"):
        rep = run_pipeline(VerifierConfig(ctype="F4", node=2, mode="exact", spec=negative_control_spec(kind).to_dict()))
        failed_res = [c for c in rep.failed() if c.name.startswith("residue")]
        witnessed = [c for c in failed_res if c.witnesses.get("localized_weights") or "point" in c.witnesses]
        ok &= rep.status == FAILED and bool(witnessed)
        where = ""
        expansion = [c for c in witnessed if "localized_weights" in c.witnesses]
        vanishing = [c for c in rep.failed() if c.name.startswith("vanishing") and "localized_coset" in c.witnesses]
        if expansion:
            w = expansion[0].witnesses
            where = f" first at m={w['first_m']}, weight {w['localized_weights'][0]['weight']}"
        elif witnessed:
            where = f" ({witnessed[0].name} differs at a sample point)"
        if vanishing:
            vw = vanishing[0].witnesses
            where += (f"; {vanishing[0].name} localized to coset {vw['localized_coset']} W_{vw['inner_subgroup']}"
                      f" of {vw['coset_count']}")
        summary.append(f"{kind}: {rep.status}, {len(failed_res)} residue checks failed{where}")
    elapsed = time.perf_counter() - t0
    report(7, ok, "; ".join(summary), elapsed)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
