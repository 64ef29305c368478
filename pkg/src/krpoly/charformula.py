"""Irreducible characters via the Weyl character formula.

The numerator is the alternating orbit sum of e^{lambda+rho}; the quotient by
the Weyl denominator is taken one positive-root binomial at a time, which
keeps every step linear in the size of the intermediate polynomial.
"""
from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Protocol

from . import kernels as K
from .groupring import GroupRingElem, NotDivisible
from .rootsys import RootSystem, Weight
from .weylgrp import NotDominant, weyl_group


class CharacterStore(Protocol):
    def get(self, R: RootSystem, lam: Weight) -> GroupRingElem | None: ...

    def put(self, R: RootSystem, lam: Weight, value: GroupRingElem) -> None: ...


@dataclass(frozen=True)
class Character:
    weight: Weight
    value: GroupRingElem

    def dimension(self) -> int:
        return self.value.coefficient_sum()


def _require_dominant(lam: Weight):
    if lam.scale != 1 or not lam.is_dominant():
        raise NotDominant(f"{lam} is not an integral dominant weight")


def signed_orbit(R: RootSystem, mu: Weight) -> dict[Weight, int]:
    """{w(mu): (-1)^l(w)} for a regular dominant mu, by reflection BFS."""
    W = weyl_group(R)
    out = {mu: 1}
    queue = deque([mu])
    while queue:
        nu = queue.popleft()
        s = out[nu]
        for a in R.nodes:
            x = W.reflect(a, nu)
            if x not in out:
                out[x] = -s
                queue.append(x)
    return out


def weyl_numerator(R: RootSystem, lam: Weight) -> GroupRingElem:
    """sum_w (-1)^l(w) e^{w(lam + rho)}."""
    _require_dominant(lam)
    orb = signed_orbit(R, lam + R.rho)
    return GroupRingElem.from_weights(R.rank, orb.items())


def weyl_denominator(R: RootSystem) -> GroupRingElem:
    return weyl_numerator(R, R.zero())


def divide_by_denominator(R: RootSystem, f: GroupRingElem) -> GroupRingElem:
    """f / Delta, with Delta = e^rho prod_{alpha>0} (1 - e^{-alpha})."""
    terms = f.terms
    total_shift = -K.pack(R.rho.coords)
    sign = 1
    for alpha in R.positive_roots:
        n = K.pack((-alpha).coords)
        if n < 0:
            # 1 - x^n = -x^n (1 - x^{-n})
            n = -n
            total_shift += n
            sign = -sign
        q = K.div_binomial(terms, n)
        if q is None:
            raise NotDivisible(f"not divisible by 1 - e^(-({alpha}))")
        terms = q
    return GroupRingElem(f.rank, K.shift(terms, total_shift, sign), f.scale)


_memo: dict[tuple[str, tuple[int, ...]], GroupRingElem] = {}
_memo_lock = threading.Lock()
_default_store: CharacterStore | None = None


def use_store(store: CharacterStore | None) -> CharacterStore | None:
    """Persist every character computed from now on (None switches persistence off); returns the old store."""
    global _default_store
    prev, _default_store = _default_store, store
    return prev


def character(R: RootSystem, lam: Weight, store: CharacterStore | None = None) -> Character:
    _require_dominant(lam)
    store = store if store is not None else _default_store
    key = (str(R.ctype), lam.coords)
    val = _memo.get(key)
    if val is None and store is not None:
        val = store.get(R, lam)
    if val is None:
        val = divide_by_denominator(R, weyl_numerator(R, lam))
        if store is not None:
            store.put(R, lam, val)
    with _memo_lock:
        _memo.setdefault(key, val)
    return Character(lam, val)


def clear_memo():
    with _memo_lock:
        _memo.clear()


def dimension(R: RootSystem, lam: Weight) -> int:
    """Weyl dimension formula prod_{alpha>0} (lam+rho, alpha)/(rho, alpha)."""
    _require_dominant(lam)
    lr = lam + R.rho
    num, den = Fraction(1), Fraction(1)
    for alpha in R.positive_roots:
        num *= R.form(lr, alpha)
        den *= R.form(R.rho, alpha)
    d = num / den
    assert d.denominator == 1
    return int(d)


def dominant_part(R: RootSystem, f: GroupRingElem) -> dict[Weight, int]:
    """Coefficients of f at dominant weights; determines a W-invariant f."""
    return {w: c for w, c in f.items() if w.is_dominant()}


def decompose(R: RootSystem, f: GroupRingElem) -> dict[Weight, int]:
    """Multiplicities of irreducibles in a W-invariant f (peeling highest weights)."""
    rest = dict(dominant_part(R, f))
    out: dict[Weight, int] = {}
    inv = R.cartan_inverse
    n = R.rank

    def height(w: Weight):
        # sum of simple-root coordinates orders weights compatibly with dominance
        return sum(sum(inv[i][j] * w.coords[j] for j in range(n)) for i in range(n))

    while rest:
        top = max(rest, key=lambda w: (height(w), w.coords))
        c = rest.pop(top)
        if not c:
            continue
        out[top] = c
        for w, m in dominant_part(R, character(R, top).value).items():
            if w == top:
                continue
            v = rest.get(w, 0) - c * m
            if v:
                rest[w] = v
            else:
                rest.pop(w, None)
    return out
