import random

import pytest

from krpoly.charformula import character
from krpoly.groupring import GroupRingElem
from krpoly.polyform import (Factor, FormulaError, PolyhedralSpec, UnknownSpec, VanishingFailure,
                             check_E_vanishing, coeff_D, compile_formula, multiplicities_direct,
                             multiplicities_series, p_m_direct, p_m_series, partial_fractions_row, resum_identity)
from krpoly.qsystem import coeff_C2, q1_f4
from krpoly.rootsys import Weight


def q2(m):
    if m == 0:
        return GroupRingElem.one(4)
    return q1_f4(m) * q1_f4(m) - q1_f4(m - 1) * q1_f4(m + 1)


def test_m1_multiplicities(f4_spec):
    assert multiplicities_direct(f4_spec, 0) == {Weight((0, 0, 0, 0)): 1}
    got = multiplicities_direct(f4_spec, 1)
    assert got == {Weight((0, 0, 0, 0)): 1, Weight((1, 0, 0, 0)): 2, Weight((0, 0, 0, 2)): 1,
                   Weight((0, 1, 0, 0)): 1}


def test_multiplicity_two_routes(f4_spec):
    for m in range(7):
        assert multiplicities_direct(f4_spec, m) == multiplicities_series(f4_spec, m)


def test_p_m_matches_q_system(f4_spec):
    for m in range(3):
        assert p_m_direct(f4_spec, m) == q2(m)
    assert p_m_series(f4_spec, 2) == q2(2)


@pytest.mark.parametrize("name,node", [("A1", 1), ("A2", 1), ("A2", 2)])
def test_a_type_specs(name, node):
    spec = PolyhedralSpec.packaged(name, node)
    R = spec.root_system
    for m in range(13):
        mults = multiplicities_direct(spec, m)
        assert mults == multiplicities_series(spec, m)
        assert mults == {R.fundamental(node) * m: 1}


def test_packaged_lookup():
    with pytest.raises(UnknownSpec):
        PolyhedralSpec.packaged("E8", 1)
    spec = PolyhedralSpec.load()
    assert PolyhedralSpec.from_dict(spec.to_dict()) == spec
    spec.validate()
    with pytest.raises(ValueError):
        spec.with_power(1, 0).validate()


def test_resum_random_rows(f4_spec, WF4):
    rng = random.Random(3)
    els = WF4.elements()
    for _ in range(20):
        assert resum_identity(f4_spec, partial_fractions_row(f4_spec, rng.choice(els)))


def test_resum_detects_wrong_part(f4_spec, WF4):
    row = partial_fractions_row(f4_spec, WF4.identity)
    i = next(iter(row.simple_parts))
    row.simple_parts[i] = row.simple_parts[i] + row.simple_parts[i]
    assert not resum_identity(f4_spec, row)


def test_identity_row_simple_part_at_zero(f4_spec, WF4):
    # cover-up at lam = 0 with w = id: prod over the other factors evaluated at t = 1
    row = partial_fractions_row(f4_spec, WF4.identity)
    from krpoly.groupring import GeoFraction
    want = GeoFraction.one(4)
    for j, f in enumerate(f4_spec.factors):
        if j == 0:
            continue
        for _ in range(f.power):
            want = want.mul(GeoFraction.inverse_binomial(f.weight))
    assert row.simple_parts[0] == want


@pytest.mark.parametrize("lam,route,J", [((0, 0, 2, 0), "parabolic", [1, 2]),
                                         ((0, 1, 0, 0), "parabolic", [1, 3]),
                                         ((1, 0, 0, 0), "pairing", [2, 4])])
def test_vanishing_certificates(f4_spec, lam, route, J):
    cert = check_E_vanishing(f4_spec, Weight(lam))
    assert cert.route == route and cert.subgroup == J
    generic = check_E_vanishing(f4_spec, Weight(lam), documented_first=False)
    assert generic.weight == Weight(lam)


def test_vanishing_fails_for_perturbed_factor(f4_spec):
    facs = [Factor(Weight((0, 0, 1, 0)), 2, 1) if i == 2 else f for i, f in enumerate(f4_spec.factors)]
    bad = PolyhedralSpec("F4", 2, facs)
    with pytest.raises(VanishingFailure) as exc:
        check_E_vanishing(bad, Weight((0, 0, 1, 0)))
    assert exc.value.remainder is not None


def test_residue_2omega4_and_invariance(f4_spec, WF4, F4):
    lam = Weight((0, 0, 0, 2))
    d = coeff_D(f4_spec, lam).value
    assert d == coeff_C2(F4, lam).value
    for a in WF4.stabilizer_nodes(lam):
        assert d.weyl_act(WF4.from_word((a,))) == d


def test_formula_parser():
    f = compile_formula("min(1 + j3, m - j1) * (j4 + 1) - abs(j1 // 2) % 3")
    assert f({"j1": 3, "j3": 0, "j4": 1, "m": 5}) == 1 * 2 - 1 % 3
    cmp = compile_formula("j1 + 2*j2 <= m")
    assert cmp({"j1": 1, "j2": 1, "m": 3}) == 1 and cmp({"j1": 2, "j2": 1, "m": 3}) == 0
    for bad in ["__import__('os')", "j1 ** 2", "lambda: 1", "j1 +", "x.y", "[1]"]:
        with pytest.raises(FormulaError):
            compile_formula(bad)
    with pytest.raises(FormulaError):
        compile_formula("j9 + 1")({"j1": 0})


def test_character_sum_consistent(f4_spec, F4):
    mults = multiplicities_direct(f4_spec, 1)
    total = GroupRingElem.zero(4)
    for lam, c in mults.items():
        total = total + character(F4, lam).value * c
    assert total == p_m_direct(f4_spec, 1)
