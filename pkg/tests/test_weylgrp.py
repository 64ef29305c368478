import itertools
import random

import pytest

from krpoly.rootsys import Weight, build_root_system
from krpoly.weylgrp import NotASubset, NotDominant, _det, weyl_group


def test_reflect_examples(F4, WF4):
    A1 = build_root_system("A1")
    W1 = weyl_group(A1)
    assert W1.reflect(1, Weight((1,))) == Weight((-1,))
    assert WF4.reflect(2, F4.zero()) == F4.zero()
    w2 = F4.fundamental(2)
    assert WF4.reflect(2, w2) == w2 - F4.simple_root(2)
    assert WF4.reflect(2, w2) == Weight((1, -1, 2, 0))


def test_orbit_sizes(F4, WF4):
    assert WF4.order == 1152
    assert WF4.orbit(F4.zero()) == [F4.zero()]
    assert len(WF4.orbit(F4.fundamental(1))) == 24
    assert len(WF4.orbit(F4.fundamental(2))) == 1152 // len(WF4.enumerate_parabolic({1, 3, 4})) == 96
    assert len(WF4.orbit(F4.fundamental(4))) == 24


def test_dominant_representative(F4, WF4):
    lam = F4.fundamental(3)
    mu, w = WF4.dominant_representative(lam)
    assert mu == lam and w.length == 0
    W1 = weyl_group(build_root_system("A1"))
    mu, w = W1.dominant_representative(Weight((-1,)))
    assert mu == Weight((1,)) and w.word == (1,)
    for nu in WF4.orbit(F4.fundamental(1)):
        dom, w = WF4.dominant_representative(nu)
        assert dom == F4.fundamental(1)
        assert w.apply(dom) == nu


def test_stabilizers(F4, WF4):
    assert WF4.stabilizer_nodes(F4.zero()) == {1, 2, 3, 4}
    assert WF4.stabilizer_nodes(Weight((0, 0, 2, 0))) == {1, 2, 4}
    assert WF4.stabilizer_nodes(F4.fundamental(2)) == {1, 3, 4}
    with pytest.raises(NotDominant):
        WF4.stabilizer_nodes(Weight((1, -1, 0, 0)))


def test_parabolic_sizes(WF4):
    assert len(WF4.enumerate_parabolic(set())) == 1
    assert len(WF4.enumerate_parabolic({1, 2, 3, 4})) == 1152
    assert len(WF4.enumerate_parabolic({2, 4})) == 4


def test_coset_reps(WF4):
    assert [w.length for w in WF4.min_coset_reps({1, 2}, {1, 2})] == [0]
    assert len(WF4.min_coset_reps({1, 3, 4})) == 96
    assert len(WF4.min_coset_reps({2, 4}, {2, 3, 4})) == 12
    with pytest.raises(NotASubset):
        WF4.min_coset_reps({1, 2}, {2, 3})


@pytest.mark.parametrize("J,parent", [({1, 3, 4}, None), ({2, 4}, {2, 3, 4}), ({1, 2}, {1, 2, 4}),
                                      ({1, 3}, {1, 3, 4}), ({1, 2, 3}, None)])
def test_coset_partition(WF4, J, parent):
    reps = WF4.min_coset_reps(J, parent)
    sub = WF4.enumerate_parabolic(J)
    whole = WF4.enumerate_parabolic(parent)
    products = [WF4.multiply(v, u).matrix for v in reps for u in sub]
    assert len(products) == len(set(products)) == len(whole)
    assert set(products) == {w.matrix for w in whole}
    for v in reps:
        assert all(WF4.multiply(v, u).length >= v.length for u in sub)


def test_group_action_and_sign(F4, WF4):
    rng = random.Random(3)
    lam = Weight((3, -1, 2, 5))
    for _ in range(30):
        u = WF4.from_word([rng.randint(1, 4) for _ in range(rng.randint(0, 20))])
        v = WF4.from_word([rng.randint(1, 4) for _ in range(rng.randint(0, 20))])
        assert WF4.multiply(u, v).apply(lam) == u.apply(v.apply(lam))
    for w in WF4.elements()[::37]:
        assert w.sign == _det(w.matrix)


def test_orbit_stabilizer(F4, WF4):
    for c in itertools.product(range(3), repeat=4):
        lam = Weight(c)
        assert len(WF4.orbit(lam)) * len(WF4.enumerate_parabolic(WF4.stabilizer_nodes(lam))) == 1152
