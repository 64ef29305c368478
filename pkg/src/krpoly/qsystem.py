"""Q-system recursion, pole tables and residue coefficients of Q^(a)(t).

Conventions: ``C[a][b] = alpha_b(h_a)``; nodes are 1-based.  The generating
function Q^(a)(t) = sum_m Q^(a)_m t^m has denominator

    D(t) = prod_{lam in Lambda} (1 - e^lam t) * prod_{lam in Lambda'} (1 - e^lam t^{t_a}),

and for each simple pole t = zeta^{-1} e^{-lam/l} the residue datum
C(lam, zeta, l) is the coefficient of zeta^m e^{m lam / l} in Q^(a)_m.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

from . import kernels as K
from .charformula import character, signed_orbit
from .groupring import GeoFraction, GroupRingElem, NotDivisible
from .rootsys import RootSystem, Weight, build_root_system
from .weylgrp import weyl_group


class UnknownTable(LookupError):
    pass


class UnknownSeed(LookupError):
    pass


class QSystemDivisionFailure(ArithmeticError):
    pass


class RecurrenceViolation(AssertionError):
    def __init__(self, index: int, msg: str = ""):
        super().__init__(msg or f"recurrence fails at index {index}")
        self.index = index


class PoleNotSimple(ArithmeticError):
    pass


class EmptyS(ValueError):
    pass


# ---------------------------------------------------------------------------
# data


@lru_cache(maxsize=None)
def _load_json(name: str) -> dict:
    with resources.files("krpoly.data").joinpath(name).open("r") as fh:
        return json.load(fh)


@dataclass(frozen=True)
class PoleSpec:
    weight: Weight
    zeta_order: int = 1
    zeta_index: int = 0

    def __post_init__(self):
        if self.zeta_order not in (1, 2, 3):
            raise ValueError("only roots of unity of order <= 3 are supported")


@dataclass(frozen=True)
class LambdaTable:
    ctype: str
    node: int
    lambda_a: tuple[Weight, ...]
    lambda_a_prime: tuple[Weight, ...] = ()

    def expanded(self, R: RootSystem) -> tuple[list[Weight], list[Weight]]:
        W = weyl_group(R)
        full = [mu for lam in self.lambda_a for mu in W.orbit(lam)]
        full_p = [mu for lam in self.lambda_a_prime for mu in W.orbit(lam)]
        return full, full_p

    def degree(self, R: RootSystem) -> int:
        full, full_p = self.expanded(R)
        return len(full) + R.t[self.node - 1] * len(full_p)

    def check(self, R: RootSystem) -> dict:
        """Sanity: omega_a in Lambda_a and t_a Lambda_a disjoint from Lambda'_a."""
        full, full_p = self.expanded(R)
        ta = R.t[self.node - 1]
        fund = R.fundamental(self.node)
        return {
            "contains_fundamental": fund in set(full),
            "disjoint": not ({mu * ta for mu in full} & set(full_p)),
            "distinct": len(set(full)) == len(full) and len(set(full_p)) == len(full_p),
        }

    def denominator(self, R: RootSystem) -> list[tuple[Weight, int]]:
        """(weight, t-degree) for each linear/higher factor of D(t)."""
        full, full_p = self.expanded(R)
        ta = R.t[self.node - 1]
        return [(mu, 1) for mu in full] + [(mu, ta) for mu in full_p]


def lambda_table(R: RootSystem, node: int, config: Mapping | None = None) -> LambdaTable:
    """Pole table for (type, node): config, packaged data, or the simply-laced rule."""
    name = str(R.ctype)
    data = config if config is not None else _load_json("tables.json")
    entry = data.get(name, {}).get(str(node))
    if entry is not None:
        return LambdaTable(
            name,
            node,
            tuple(Weight(tuple(c)) for c in entry["lambda"]),
            tuple(Weight(tuple(c)) for c in entry.get("lambda_prime", [])),
        )
    if R.ctype.family in "ADE" and 1 <= node <= R.rank:
        # simply laced: the dominant weights of the fundamental representation
        chi = character(R, R.fundamental(node)).value
        dom = sorted((w for w, _ in chi.items() if w.is_dominant()), reverse=True)
        return LambdaTable(name, node, tuple(dom), ())
    raise UnknownTable(f"no pole table for {name} node {node}")


def seed(R: RootSystem, node: int, config: Mapping | None = None) -> GroupRingElem:
    """Q^(a)_1 from config, packaged data, or the minuscule default."""
    name = str(R.ctype)
    data = config if config is not None else _load_json("seeds.json")
    entry = data.get(name, {}).get(str(node))
    if entry is not None:
        out = GroupRingElem.zero(R.rank)
        for coords, mult in entry:
            out = out + character(R, Weight(tuple(coords))).value * mult
        return out
    fam, n = R.ctype.family, R.rank
    if fam == "A" or (fam == "D" and node in (1, n - 1, n)):
        return character(R, R.fundamental(node)).value
    raise UnknownSeed(f"no Q_1 seed for {name} node {node}")


# ---------------------------------------------------------------------------
# Q-system


@dataclass
class QSeries:
    node: int
    terms: list[GroupRingElem] = field(default_factory=list)

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, m):
        return self.terms[m]


class QSystem:
    """Demand-driven solution of the Q-system from m = 0, 1 data.

    Neighbor indices floor((C_ba m - k)/C_ab) can run ahead of m (a long node
    next to a short one needs Q^(b)_{t m}), so terms are produced recursively
    with memoization rather than in lock-step.
    """

    def __init__(self, R: RootSystem, seeds: Mapping[int, GroupRingElem] | None = None,
                 seed_config: Mapping | None = None, nodes: Sequence[int] | None = None):
        self.R = R
        self._seed_config = seed_config
        self._terms: dict[tuple[int, int], GroupRingElem] = {}
        self._seeds = dict(seeds or {})
        self._nodes = list(nodes) if nodes is not None else list(R.nodes)

    def seed(self, a: int) -> GroupRingElem:
        if a not in self._seeds:
            self._seeds[a] = seed(self.R, a, self._seed_config)
        return self._seeds[a]

    def coupling(self, a: int, m: int) -> GroupRingElem:
        """prod_{b: C_ab<0} prod_{k=0}^{-C_ab-1} Q^(b)_{floor((C_ba m - k)/C_ab)}."""
        C = self.R.cartan
        out = GroupRingElem.one(self.R.rank)
        for b in self.R.nodes:
            cab = C[a - 1][b - 1]
            if b == a or cab >= 0:
                continue
            cba = C[b - 1][a - 1]
            for k in range(-cab):
                out = out * self.term(b, (cba * m - k) // cab)
        return out

    def term(self, a: int, m: int) -> GroupRingElem:
        if m < 0:
            raise ValueError("negative index")
        if m == 0:
            return GroupRingElem.one(self.R.rank)
        if m == 1:
            return self.seed(a)
        key = (a, m)
        got = self._terms.get(key)
        if got is not None:
            return got
        prev = self.term(a, m - 1)
        num = prev * prev - self.coupling(a, m - 1)
        den = self.term(a, m - 2)
        try:
            val = num.exact_divide(den)
        except NotDivisible as exc:
            raise QSystemDivisionFailure(f"Q^({a})_{m} is not a Laurent polynomial") from exc
        self._terms[key] = val
        return val

    def series(self, a: int, upto: int) -> QSeries:
        return QSeries(a, [self.term(a, m) for m in range(upto + 1)])

    def residual(self, a: int, m: int) -> GroupRingElem:
        """(Q_m)^2 - Q_{m+1} Q_{m-1} - coupling; zero when the system holds."""
        q = self.term(a, m)
        return q * q - self.term(a, m + 1) * self.term(a, m - 1) - self.coupling(a, m)


def q_system_step(R: RootSystem, all_series: Mapping[int, QSeries], m: int,
                  seeds: Mapping[int, GroupRingElem] | None = None) -> dict[int, GroupRingElem]:
    """Q^(a)_{m+1} for every node a, given series known through index m.

    Neighbor terms beyond the supplied series are generated on demand.
    """
    if m == 0:
        return {a: all_series[a][1] for a in all_series}
    qs = QSystem(R, seeds=seeds or {a: s[1] for a, s in all_series.items()})
    for a, s in all_series.items():
        for k, t in enumerate(s.terms):
            if k >= 2:
                qs._terms[(a, k)] = t
    return {a: qs.term(a, m + 1) for a in all_series}


def q1_f4(m: int) -> GroupRingElem:
    """sum_{k<=m} chi(L(k omega_1)) in F4."""
    R = build_root_system("F4")
    out = GroupRingElem.zero(4)
    for k in range(m + 1):
        out = out + character(R, Weight((k, 0, 0, 0))).value
    return out


# ---------------------------------------------------------------------------
# linear recurrence


def _poly_mul_t(p: list[GroupRingElem], q: list[GroupRingElem]) -> list[GroupRingElem]:
    rank = p[0].rank
    out = [GroupRingElem.zero(rank) for _ in range(len(p) + len(q) - 1)]
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            if b.is_zero():
                continue
            out[i + j] = out[i + j] + a * b
    return out


def denominator_polynomial(R: RootSystem, table: LambdaTable) -> list[GroupRingElem]:
    """Coefficients of D(t) in increasing powers of t."""
    poly = [GroupRingElem.one(R.rank)]
    for mu, d in table.denominator(R):
        fac = [GroupRingElem.one(R.rank)] + [GroupRingElem.zero(R.rank)] * (d - 1)
        fac.append(-GroupRingElem.monomial(mu))
        poly = _poly_mul_t(poly, fac)
    return poly


@dataclass
class RecurrenceReport:
    degree: int
    checked: list[int]
    numerator: list[GroupRingElem]


def check_linear_recurrence(series: QSeries, table: LambdaTable, extra: int,
                            R: RootSystem | None = None) -> RecurrenceReport:
    """Convolve the series with D(t); indices deg D .. deg D + extra must vanish."""
    R = R or build_root_system(table.ctype)
    D = denominator_polynomial(R, table)
    deg = len(D) - 1
    need = deg + extra
    if len(series) <= need:
        raise ValueError(f"need {need + 1} terms, have {len(series)}")
    numer = []
    checked = []
    for n in range(need + 1):
        acc: dict = {}
        for i in range(max(0, n - len(series) + 1), min(n, deg) + 1):
            if D[i].is_zero():
                continue
            acc = K.add(acc, K.mul(D[i].terms, series[n - i].terms))
        val = GroupRingElem(R.rank, acc)
        if n < deg:
            numer.append(val)
        else:
            if not val.is_zero():
                raise RecurrenceViolation(n)
            checked.append(n)
    return RecurrenceReport(deg, checked, numer)


def fold_product(R: RootSystem, f: GroupRingElem, lam: Weight) -> dict[Weight, int]:
    """f * chi(L(lam)) in the character basis, for W-invariant f (Brauer-Klimyk)."""
    roots = [R.simple_root(a).coords for a in R.nodes]
    base = (lam + R.rho).coords
    folded = K.dominant_fold(f.terms, base, roots, R.rank)
    return {Weight(K.unpack(k, R.rank)): c for k, c in folded.items()}


def check_linear_recurrence_characters(series: Sequence[Mapping[Weight, int]], table: LambdaTable,
                                       extra: int, R: RootSystem | None = None) -> RecurrenceReport:
    """check_linear_recurrence for a series given by irreducible multiplicities.

    Each product D_i * chi(L(lam)) is folded straight into the character
    basis, so characters of large highest weight are never expanded.
    """
    R = R or build_root_system(table.ctype)
    D = denominator_polynomial(R, table)
    deg = len(D) - 1
    need = deg + extra
    if len(series) <= need:
        raise ValueError(f"need {need + 1} terms, have {len(series)}")
    memo: dict[tuple[int, Weight], dict[Weight, int]] = {}
    checked = []
    for n in range(deg, need + 1):
        acc: dict[Weight, int] = {}
        for i in range(max(0, n - len(series) + 1), min(n, deg) + 1):
            if D[i].is_zero():
                continue
            for lam, c in series[n - i].items():
                key = (i, lam)
                if key not in memo:
                    memo[key] = fold_product(R, D[i], lam)
                for mu, v in memo[key].items():
                    s = acc.get(mu, 0) + c * v
                    if s:
                        acc[mu] = s
                    else:
                        acc.pop(mu, None)
        if acc:
            raise RecurrenceViolation(n, f"nonzero remainder with {len(acc)} irreducible constituents")
        checked.append(n)
    return RecurrenceReport(deg, checked, [])


def q1_f4_characters(m: int) -> dict[Weight, int]:
    return {Weight((k, 0, 0, 0)): 1 for k in range(m + 1)}


def _add_scaled(acc: dict[Weight, int], src: Mapping[Weight, int], c: int):
    for w, v in src.items():
        s = acc.get(w, 0) + c * v
        if s:
            acc[w] = s
        else:
            acc.pop(w, None)


class CharacterQSystem:
    """The Q-system solved in the basis of irreducible characters.

    A product folds the monomial expansion of one factor against the
    constituents of the other; a quotient peels constituents off the top by
    height.  Only sums of characters are ever expanded, never products, which
    keeps the long-index terms of short nodes tractable.
    """

    def __init__(self, R: RootSystem, seeds: Mapping[int, Mapping[Weight, int]] | None = None,
                 seed_config: Mapping | None = None):
        from .charformula import decompose
        self.R = R
        self._decompose = decompose
        self._seed_config = seed_config
        self._seeds = {a: dict(v) for a, v in (seeds or {}).items()}
        self._terms: dict[tuple[int, int], dict[Weight, int]] = {}
        self._expanded: dict[tuple[int, int], GroupRingElem] = {}
        inv = R.cartan_inverse
        n = R.rank
        col = [sum(Fraction(inv[i][j]) for i in range(n)) for j in range(n)]
        scale = math.lcm(*(c.denominator for c in col))
        hvec = [int(c * scale) for c in col]
        # integer multiple of the height (sum of simple-root coordinates)
        self._height = lambda w: sum(h * x for h, x in zip(hvec, w.coords))

    def seed(self, a: int) -> dict[Weight, int]:
        if a not in self._seeds:
            self._seeds[a] = self._decompose(self.R, seed(self.R, a, self._seed_config))
        return self._seeds[a]

    def expand(self, x: Mapping[Weight, int]) -> GroupRingElem:
        """Monomial form of sum_lam c_lam chi(L(lam)), by one Weyl-formula division of the summed numerators."""
        from .charformula import divide_by_denominator
        num: dict = {}
        for lam, c in x.items():
            orb = signed_orbit(self.R, lam + self.R.rho)
            num = K.add(num, {K.pack(mu.coords): c * s for mu, s in orb.items()})
        return divide_by_denominator(self.R, GroupRingElem(self.R.rank, num))

    def _expand_term(self, key: tuple[int, int]) -> GroupRingElem:
        got = self._expanded.get(key)
        if got is None:
            got = self._expanded[key] = self.expand(self.term(*key))
        return got

    def _fold_all(self, f: GroupRingElem, y: Mapping[Weight, int]) -> dict[Weight, int]:
        out: dict[Weight, int] = {}
        for lam, c in y.items():
            _add_scaled(out, fold_product(self.R, f, lam), c)
        return out

    def _mul_terms(self, kx: tuple[int, int], ky: tuple[int, int]) -> dict[Weight, int]:
        x, y = self.term(*kx), self.term(*ky)
        # expand the factor with the smaller highest weight, fold over the other's constituents
        if max(map(self._height, x), default=0) > max(map(self._height, y), default=0):
            kx, ky, x, y = ky, kx, y, x
        return self._fold_all(self._expand_term(kx), y)

    def divide(self, num: Mapping[Weight, int], den_key: tuple[int, int]) -> dict[Weight, int]:
        den = self.term(*den_key)
        top = max(den, key=lambda w: (self._height(w), w.coords))
        lead = den[top]
        f = self._expand_term(den_key)
        rem = dict(num)
        q: dict[Weight, int] = {}
        key = lambda w: (-self._height(w), tuple(-x for x in w.coords))
        heap = [(key(w), w) for w in rem]
        heapq.heapify(heap)
        while heap:
            _, lam = heapq.heappop(heap)
            if lam not in rem:
                continue
            nu = lam - top
            c, r = divmod(rem[lam], lead)
            if r or not nu.is_dominant():
                raise NotDivisible(f"constituent {lam.coords} is not a multiple of the divisor")
            q[nu] = c
            for w, v in fold_product(self.R, f, nu).items():
                if w not in rem:
                    heapq.heappush(heap, (key(w), w))
                s = rem.get(w, 0) - c * v
                if s:
                    rem[w] = s
                else:
                    rem.pop(w, None)
        return q

    def coupling(self, a: int, m: int) -> dict[Weight, int]:
        C = self.R.cartan
        keys = []
        for b in self.R.nodes:
            cab = C[a - 1][b - 1]
            if b == a or cab >= 0:
                continue
            cba = C[b - 1][a - 1]
            keys += [(b, (cba * m - k) // cab) for k in range(-cab)]
        keys = [k for k in keys if k[1] > 0]
        if not keys:
            return {self.R.zero(): 1}
        acc = dict(self.term(*keys[0]))
        for i, k in enumerate(keys[1:], 1):
            if i == 1:
                acc = self._mul_terms(keys[0], k)
            else:
                acc = self._fold_all(self._expand_term(k), acc)
        return acc

    def term(self, a: int, m: int) -> dict[Weight, int]:
        if m < 0:
            raise ValueError("negative index")
        if m == 0:
            return {self.R.zero(): 1}
        if m == 1:
            return self.seed(a)
        key = (a, m)
        got = self._terms.get(key)
        if got is not None:
            return got
        num = self._mul_terms((a, m - 1), (a, m - 1))
        _add_scaled(num, self.coupling(a, m - 1), -1)
        try:
            val = self.divide(num, (a, m - 2))
        except NotDivisible as exc:
            raise QSystemDivisionFailure(f"Q^({a})_{m} is not a character") from exc
        self._terms[key] = val
        return val

    def computed_terms(self) -> dict[tuple[int, int], dict[Weight, int]]:
        return dict(self._terms)


# ---------------------------------------------------------------------------
# coefficients in cyclotomic extensions


class CycloFraction:
    """(sum_k zeta^k num_k) / (den * prod (1 - e^mu)), zeta a primitive l-th root, l <= 3.

    For l <= 2 zeta is rational and a single part is kept; for l = 3 the
    basis is (1, zeta) with zeta^2 = -1 - zeta.  ``den`` is a positive
    integer for the constants 1/(1 - zeta^j) that are not integral.
    """

    __slots__ = ("order", "parts", "den")

    def __init__(self, order: int, parts: list[GeoFraction], den: int = 1):
        self.order = order
        self.parts = parts
        self.den = den

    @property
    def width(self) -> int:
        return 2 if self.order == 3 else 1

    @classmethod
    def scalar(cls, order: int, f: GeoFraction) -> "CycloFraction":
        if order == 3:
            return cls(3, [f, GeoFraction.zero(f.rank)._rescaled(f.scale)])
        return cls(order, [f])

    @staticmethod
    def zeta_power(order: int, k: int) -> list[int]:
        """zeta^k in the basis, as integers."""
        k %= order
        if order == 1:
            return [1]
        if order == 2:
            return [(-1) ** k]
        return [[1, 0], [0, 1], [-1, -1]][k]

    def lift(self, order: int) -> "CycloFraction":
        if order == self.order:
            return self
        if order == 3 and self.order == 1:
            return CycloFraction(3, self.parts + [GeoFraction.zero(self.parts[0].rank)._rescaled(self.parts[0].scale)], self.den)
        if order == 2 and self.order == 1:
            return CycloFraction(2, self.parts, self.den)
        raise PoleNotSimple(f"cannot combine roots of unity of orders {self.order} and {order}")

    def mul(self, other: "CycloFraction") -> "CycloFraction":
        order = max(self.order, other.order)
        a, b = self.lift(order), other.lift(order)
        if order == 3:
            a0, a1 = a.parts
            b0, b1 = b.parts
            # (a0 + a1 z)(b0 + b1 z) with z^2 = -1 - z
            c = a1 * b1
            return CycloFraction(3, [a0 * b0 - c, a0 * b1 + a1 * b0 - c], a.den * b.den)
        return CycloFraction(order, [a.parts[0] * b.parts[0]], a.den * b.den)

    def _combine(self, other: "CycloFraction", sign: int) -> "CycloFraction":
        order = max(self.order, other.order)
        a, b = self.lift(order), other.lift(order)
        parts = [x * b.den + (y * a.den) * sign for x, y in zip(a.parts, b.parts)]
        return CycloFraction(order, parts, a.den * b.den)

    def __add__(self, other: "CycloFraction") -> "CycloFraction":
        return self._combine(other, 1)

    def __sub__(self, other: "CycloFraction") -> "CycloFraction":
        return self._combine(other, -1)

    def normalized(self) -> "CycloFraction":
        return CycloFraction(self.order, [p.normalized() for p in self.parts], self.den)

    def is_zero(self) -> bool:
        return all(p.normalized().is_zero() for p in self.parts)

    def __eq__(self, other):
        if isinstance(other, GeoFraction):
            other = CycloFraction.scalar(self.order, other)
        return (self - other).is_zero()

    __hash__ = None

    def weyl_act(self, w) -> "CycloFraction":
        return CycloFraction(self.order, [p.weyl_act(w) for p in self.parts], self.den)

    def __repr__(self):
        return f"CycloFraction(order={self.order}, den={self.den}, parts={self.parts})"


def _binomial_inverse_cyclo(x: Weight, coeff: list[int], order: int, rank: int) -> CycloFraction:
    """1 / (1 - c e^x) where c = zeta^k (given in the basis) and c^order = 1.

    Uses prod_j (1 - zeta^j y) = 1 - y^order to clear zeta from the denominator.
    """
    if order == 1 or coeff == [1] or coeff == [1, 0]:
        f = GeoFraction.inverse_binomial(x)
        return CycloFraction.scalar(order, f)
    if order == 2:
        # 1/(1 + e^x) = (1 - e^x) / (1 - e^{2x})
        num = GroupRingElem.one(rank) - GroupRingElem.monomial(x)
        return CycloFraction(2, [GeoFraction.build(num, [x * 2])])
    # order 3, c = zeta or zeta^2: 1/(1 - c y) = (1 - c' y)(1 - y) / (1 - y^3), c' the conjugate
    conj = [-1, -1] if coeff == [0, 1] else [0, 1]
    y = GroupRingElem.monomial(x)
    one = GroupRingElem.one(rank)
    # (1 - c' y)(1 - y) = (1 - y) - c' (y - y^2)
    base = one - y
    tail = y - y * y
    p0 = GeoFraction.build(base - tail * conj[0], [x * 3])
    p1 = GeoFraction.build(-(tail * conj[1]), [x * 3])
    return CycloFraction(3, [p0, p1])


# ---------------------------------------------------------------------------
# residues


@dataclass
class ResidueCoeff:
    pole: PoleSpec
    value: GeoFraction | CycloFraction


def delta_fraction(R: RootSystem) -> GeoFraction:
    """1/Delta = e^{-rho} / prod_{alpha>0} (1 - e^{-alpha})."""
    return GeoFraction.build(GroupRingElem.monomial(-R.rho), [-a for a in R.positive_roots])


def mukhin_young(R: RootSystem, a: int) -> GeoFraction:
    """1 / prod_{alpha>0} (1 - e^{-alpha})^{[alpha]_a}."""
    factors = []
    for alpha in R.positive_roots:
        k = R.expand_in_simple_roots(alpha)[a - 1]
        factors += [-alpha] * k
    return GeoFraction.build(GroupRingElem.one(R.rank), factors)


def coeff_C1_fund(R: RootSystem | None = None) -> ResidueCoeff:
    R = R or build_root_system("F4")
    return ResidueCoeff(PoleSpec(R.fundamental(1)), mukhin_young(R, 1))


def alternating_simple_pole_sum(R: RootSystem, lam: Weight) -> GeoFraction:
    """sum_w (-1)^l(w) e^{w rho} / (1 - e^{w lam}), grouped by w(lam)."""
    W = weyl_group(R)
    groups: dict[Weight, dict] = {}
    for w in W.elements():
        mu = w.apply(lam)
        k = K.pack(w.apply(R.rho).coords)
        g = groups.setdefault(mu, {})
        g[k] = g.get(k, 0) + w.sign
    total = GeoFraction.zero(R.rank)
    for mu, num in sorted(groups.items()):
        part = GeoFraction.build(GroupRingElem(R.rank, {k: v for k, v in num.items() if v}), [mu])
        total = total + part
    return total


def coeff_C1_zero(R: RootSystem | None = None) -> ResidueCoeff:
    """(sum_w (-1)^l(w) e^{w rho}/(1 - e^{w omega_1})) / Delta."""
    R = R or build_root_system("F4")
    num = alternating_simple_pole_sum(R, R.fundamental(1))
    return ResidueCoeff(PoleSpec(R.zero()), num * delta_fraction(R))


@lru_cache(maxsize=None)
def _c1_cache(ctype: str):
    R = build_root_system(ctype)
    return coeff_C1_fund(R).value, coeff_C1_zero(R).value


def coeff_C1(R: RootSystem, lam: Weight) -> GeoFraction:
    """C^(1)_lam for lam in Lambda_1 = {0} u O(omega_1), via W-symmetry."""
    fund, zero = _c1_cache(str(R.ctype))
    if lam.is_zero():
        return zero
    W = weyl_group(R)
    dom, w = W.dominant_representative(lam)
    if dom != R.fundamental(1):
        raise ValueError(f"{lam} is not in Lambda_1")
    return fund.weyl_act(w)


def compute_S(R: RootSystem, lam: Weight, table: LambdaTable | None = None) -> list[tuple[Weight, Weight]]:
    """Ordered pairs (nu, mu) in Lambda_1 x Lambda_1 with nu != mu, nu + mu = lam."""
    table = table or lambda_table(R, 1)
    full, _ = table.expanded(R)
    fset = set(full)
    out = []
    for nu in full:
        mu = lam - nu
        if mu in fset and mu != nu:
            out.append((nu, mu))
    return sorted(out)


def coeff_C2(R: RootSystem, lam: Weight) -> ResidueCoeff:
    """sum_{(nu, mu) in S_lam} C^(1)_nu C^(1)_mu (1 - e^{nu - mu})."""
    pairs = compute_S(R, lam)
    if not pairs:
        raise EmptyS(f"S is empty for {lam}")
    total = GeoFraction.zero(R.rank)
    one = GroupRingElem.one(R.rank)
    for nu, mu in pairs:
        term = coeff_C1(R, nu).mul(coeff_C1(R, mu), normalize=False)
        term = term * GeoFraction.from_elem(one - GroupRingElem.monomial(nu - mu))
        total = total + term
    return ResidueCoeff(PoleSpec(lam), total)


def _series_numerator(series: QSeries, table: LambdaTable, R: RootSystem) -> list[GroupRingElem]:
    return check_linear_recurrence(series, table, 0, R).numerator


def residue_from_series(series: QSeries, table: LambdaTable, pole: PoleSpec,
                        R: RootSystem | None = None) -> ResidueCoeff:
    """Coefficient of zeta^m e^{m lam/l} read off N(t)/D(t) at t = zeta^{-1} e^{-lam/l}.

    C = N(t0) / prod over the other linear factors of D at t0, where every
    factor (1 - e^mu t^d) is split into the d linear factors
    (1 - zeta_d^j e^{mu/d} t).
    """
    R = R or build_root_system(table.ctype)
    N = _series_numerator(series, table, R)
    lam, l = pole.weight, pole.zeta_order
    k = pole.zeta_index
    # t0 = zeta^{-k} e^{-lam/l}; powers t0^n = zeta^{-kn} e^{-n lam/l}
    x0 = lam.divide(l)
    rank = R.rank
    acc = [GroupRingElem.zero(rank) for _ in range(2 if l == 3 else 1)]
    for n, c in enumerate(N):
        if c.is_zero():
            continue
        z = CycloFraction.zeta_power(l, -k * n)
        shifted = c.times_monomial(-(x0 * n))
        for i, zi in enumerate(z):
            if zi:
                acc[i] = acc[i] + shifted * zi
    value = CycloFraction(l, [GeoFraction.from_elem(a) for a in acc]) if l == 3 else \
        CycloFraction(l, [GeoFraction.from_elem(acc[0])])
    removed = False
    for mu, d in table.denominator(R):
        for j in range(d):
            # linear factor 1 - zeta_d^j e^{mu/d} t evaluated at t0
            # = 1 - zeta_d^j zeta_l^{-k} e^{mu/d - lam/l}
            order = math.lcm(d, l)
            if order not in (1, 2, 3):
                raise PoleNotSimple(f"mixed roots of unity of order {order}")
            expo = (j * (order // d) - k * (order // l)) % order
            x = mu.divide(d) - x0
            if x.is_zero() and expo == 0:
                if removed:
                    raise PoleNotSimple(f"pole at {lam} is not simple")
                removed = True
                continue
            if x.is_zero():
                # constant factor 1 - zeta^expo
                inv = _constant_inverse(order, expo, rank)
            else:
                inv = _binomial_inverse_cyclo(x, CycloFraction.zeta_power(order, expo), order, rank)
            value = value.mul(inv)
    if not removed:
        raise PoleNotSimple(f"{lam} (zeta order {l}) is not a pole of D(t)")
    value = value.normalized()
    if value.order < 3 and value.den == 1:
        return ResidueCoeff(pole, value.parts[0])
    return ResidueCoeff(pole, value)


def _constant_inverse(order: int, expo: int, rank: int) -> CycloFraction:
    """1 / (1 - zeta^expo) for a primitive root of the given order, expo != 0."""
    one = GeoFraction.one(rank)
    if order == 2:
        return CycloFraction(2, [one], 2)
    # (1 - z)(1 - z^2) = 3, so 1/(1 - z) = (1 - z^2)/3 = (2 + z)/3 and 1/(1 - z^2) = (1 - z)/3
    if expo == 1:
        return CycloFraction(3, [one * 2, one], 3)
    return CycloFraction(3, [one, -one], 3)


def reconstruct_term(coeffs: Mapping[Weight, GeoFraction], m: int, rank: int) -> GeoFraction:
    """sum_lam C_lam e^{m lam}, summed in groups of equal denominator first."""
    groups: dict[tuple, GeoFraction] = {}
    for lam, c in coeffs.items():
        key = tuple(sorted(c.den.items()))
        term = c.times_monomial(lam * m)
        groups[key] = term if key not in groups else groups[key].add(term, normalize=False)
    total = GeoFraction.zero(rank)
    for g in sorted(groups.values(), key=lambda f: f.degree()):
        total = total + g.normalized()
    return total
