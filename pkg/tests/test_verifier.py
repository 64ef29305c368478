import json

import pytest

from krpoly.polyform import PolyhedralSpec
from krpoly.verifier import (CONSISTENT, FAILED, PROVED, CheckRecord, VerifierConfig, VerifierReport, _run,
                             bisect_nonzero, check_residue, check_spec_consistency, negative_control_spec,
                             overall_status, run_pipeline)

SMALL = [("A1", 1), ("A2", 1), ("A2", 2), ("C2", 1), ("C2", 2)]


def _statuses(rep):
    return {c.name: c.status for c in rep.checks}


def test_config_validation():
    VerifierConfig().validate()
    for bad in [dict(mode="fast"), dict(lambda0_route="x"), dict(chunk_size=1), dict(workers=0),
                dict(max_term_check=-1)]:
        with pytest.raises(ValueError):
            VerifierConfig(**bad).validate()


def test_overall_status_rules():
    mk = lambda s, mand=True: CheckRecord("c", s, mand, "exact")
    assert overall_status([mk(PROVED), mk(CONSISTENT, False)], "exact") == PROVED
    assert overall_status([mk(PROVED), mk(CONSISTENT)], "exact") == CONSISTENT
    assert overall_status([mk(PROVED), mk(FAILED, False)], "exact") == FAILED
    assert overall_status([mk(PROVED)], "prob") == CONSISTENT


def test_bisect_nonzero():
    vals = [3, -3, 0, 5, 1, -1, 2, -2]
    lo, hi = bisect_nonzero(vals)
    assert (lo, hi) == (3, 4)
    with pytest.raises(ValueError):
        bisect_nonzero([1, -1])


def test_run_records_exceptions():
    def boom():
        raise ZeroDivisionError("x")
    rec = _run("boom", True, "exact", boom)
    assert rec.status == FAILED and "ZeroDivisionError" in json.dumps(rec.witnesses)


@pytest.mark.parametrize("ctype,node", SMALL)
def test_prob_exact_agree_small(ctype, node):
    ex = run_pipeline(VerifierConfig(ctype=ctype, node=node, mode="exact"))
    pr = run_pipeline(VerifierConfig(ctype=ctype, node=node, mode="prob"))
    assert ex.status == PROVED and pr.status == CONSISTENT
    assert set(_statuses(ex)) == set(_statuses(pr))
    assert all(s != FAILED for s in _statuses(pr).values())


@pytest.mark.parametrize("coords", [(0, 1, 0, 0), (0, 0, 0, 2)])
def test_prob_exact_agree_f4(f4_spec, coords):
    d = f4_spec.to_dict()
    ex = check_residue(d, 2, coords, "exact", 1, 3)
    pr = check_residue(d, 2, coords, "prob", 1, 3)
    assert ex.status == PROVED and pr.status == CONSISTENT


def test_prob_exact_agree_f4_failure():
    bad = negative_control_spec("drop-square").to_dict()
    ex = check_residue(bad, 2, (0, 0, 0, 2), "exact", 1, 3)
    pr = check_residue(bad, 2, (0, 0, 0, 2), "prob", 1, 3)
    assert ex.status == FAILED and pr.status == FAILED
    for w in (ex.witnesses, pr.witnesses):
        assert w["q_side_at_point"] != w["p_side_at_point"]


def test_vanishing_failure_localized_in_both_modes():
    from krpoly.verifier import check_vanishing
    bad = negative_control_spec("drop-square").to_dict()
    ex = check_vanishing(bad, (0, 1, 0, 0), "exact", 1, 3)
    pr = check_vanishing(bad, (0, 1, 0, 0), "prob", 1, 3)
    assert ex.status == FAILED and pr.status == FAILED
    assert ex.witnesses["localized_coset"] == pr.witnesses["localized_coset"]
    assert ex.witnesses["inner_subgroup"] == [1, 3] and ex.witnesses["coset_count"] == 3


def test_determinism():
    cfg = VerifierConfig(ctype="A2", node=1)
    a, b = run_pipeline(cfg), run_pipeline(cfg)
    assert [(c.name, c.status, c.witnesses) for c in a.checks] == [(c.name, c.status, c.witnesses) for c in b.checks]
    d = PolyhedralSpec.load().to_dict()
    r1, r2 = check_residue(d, 2, (0, 0, 0, 2), "exact", 1, 3), check_residue(d, 2, (0, 0, 0, 2), "exact", 1, 3)
    assert r1.witnesses["q_digest"] == r2.witnesses["q_digest"]


@pytest.mark.parametrize("ctype,node", [("A1", 1), ("A2", 2)])
def test_monotone_without_term_check(ctype, node):
    full = _statuses(run_pipeline(VerifierConfig(ctype=ctype, node=node, max_term_check=3)))
    bare = _statuses(run_pipeline(VerifierConfig(ctype=ctype, node=node, max_term_check=0)))
    assert "term-check" in full and "term-check" not in bare
    assert {k: v for k, v in full.items() if k.startswith("residue")} == \
           {k: v for k, v in bare.items() if k.startswith("residue")}


def test_report_roundtrip(tmp_path):
    path = tmp_path / "r.json"
    rep = run_pipeline(VerifierConfig(ctype="A1", node=1, report_path=str(path)))
    data = json.loads(path.read_text())
    assert data["status"] == PROVED
    back = VerifierReport.from_dict(data)
    assert back.to_dict() == json.loads(rep.to_json())
    assert back.check("residue:1").status == PROVED
    assert {"python", "kernel_backend"} <= set(data["environment"])


def test_negative_formula_caught_by_consistency(f4_spec):
    for kind in ("drop-j4-factor", "shift-min"):
        rec = _run("spec-consistency", True, "exact", lambda: check_spec_consistency(negative_control_spec(kind), 4))
        assert rec.status == FAILED
    assert check_spec_consistency(f4_spec, 4)[0] == PROVED
    with pytest.raises(ValueError):
        negative_control_spec("nope")


def test_bad_a1_spec_fails(tmp_path):
    spec = PolyhedralSpec.packaged("A1", 1).with_formula("2").to_dict()
    rep = run_pipeline(VerifierConfig(ctype="A1", node=1, spec=spec))
    assert rep.status == FAILED
    assert rep.check("term-check").status == FAILED
