"""Exact arithmetic in Z[P] and in fractions over products of (1 - e^mu).

``GroupRingElem`` is a sparse Laurent polynomial with arbitrary-precision
integer coefficients, indexed by weights.  ``GeoFraction`` keeps its
denominator factored as a multiset of binomials ``1 - e^mu`` with every
``mu`` oriented so that its first nonzero coordinate is positive; the unit
``-e^{-mu}`` produced by flipping a factor is absorbed into the numerator.
"""
from __future__ import annotations

import random
from collections import Counter
from math import gcd
from typing import Iterable, Mapping

from . import kernels as K
from .rootsys import Weight


class NotDivisible(ArithmeticError):
    pass


class DivisionByZeroFraction(ZeroDivisionError):
    pass


class UnluckyPoint(ArithmeticError):
    pass


DEFAULT_PRIME = (1 << 61) - 1


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class GroupRingElem:
    """Element of Z[P] (or of Z[P/scale] when ``scale > 1``)."""

    __slots__ = ("rank", "scale", "terms")

    def __init__(self, rank: int, terms: dict | None = None, scale: int = 1):
        self.rank = rank
        self.scale = scale
        self.terms = {} if terms is None else terms

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, rank: int) -> "GroupRingElem":
        return cls(rank)

    @classmethod
    def one(cls, rank: int) -> "GroupRingElem":
        return cls(rank, {0: 1})

    @classmethod
    def constant(cls, rank: int, c: int) -> "GroupRingElem":
        return cls(rank, {0: c} if c else {})

    @classmethod
    def monomial(cls, lam: Weight, coeff: int = 1) -> "GroupRingElem":
        return cls(lam.rank, {K.pack(lam.coords): coeff} if coeff else {}, lam.scale)

    @classmethod
    def from_weights(cls, rank: int, items: Mapping[Weight, int] | Iterable[tuple[Weight, int]]) -> "GroupRingElem":
        pairs = list(items.items()) if isinstance(items, Mapping) else list(items)
        scale = 1
        for w, _ in pairs:
            scale = _lcm(scale, w.scale)
        terms: dict = {}
        for w, c in pairs:
            k = K.pack(tuple(x * (scale // w.scale) for x in w.coords))
            s = terms.get(k, 0) + c
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return cls(rank, terms, scale)

    # views --------------------------------------------------------------
    def items(self):
        """(Weight, coefficient) pairs in lexicographic order of coordinates."""
        for k in sorted(self.terms):
            yield Weight(K.unpack(k, self.rank), self.scale), self.terms[k]

    def coefficient(self, lam: Weight) -> int:
        a = self._rescaled(_lcm(self.scale, lam.scale))
        k = K.pack(tuple(x * (a.scale // lam.scale) for x in lam.coords))
        return a.terms.get(k, 0)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient_sum(self) -> int:
        return sum(self.terms.values())

    def support(self) -> list[Weight]:
        return [w for w, _ in self.items()]

    # arithmetic ---------------------------------------------------------
    def _rescaled(self, scale: int) -> "GroupRingElem":
        if scale == self.scale:
            return self
        f = scale // self.scale
        assert f * self.scale == scale
        return GroupRingElem(self.rank, {k * f: v for k, v in self.terms.items()}, scale)

    def _align(self, other: "GroupRingElem"):
        if other.scale == self.scale:
            return self, other
        s = _lcm(self.scale, other.scale)
        return self._rescaled(s), other._rescaled(s)

    def _wrap(self, other):
        if isinstance(other, GroupRingElem):
            return other
        if isinstance(other, int):
            return GroupRingElem.constant(self.rank, other)
        return NotImplemented

    def __add__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        a, b = self._align(other)
        return GroupRingElem(a.rank, K.add(a.terms, b.terms), a.scale)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElem(self.rank, {k: -v for k, v in self.terms.items()}, self.scale)

    def __sub__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return GroupRingElem(self.rank, {}, self.scale)
            return GroupRingElem(self.rank, {k: other * v for k, v in self.terms.items()}, self.scale)
        if not isinstance(other, GroupRingElem):
            return NotImplemented
        a, b = self._align(other)
        return GroupRingElem(a.rank, K.mul(a.terms, b.terms), a.scale)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = GroupRingElem.one(self.rank)._rescaled(self.scale)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def times_monomial(self, lam: Weight, coeff: int = 1) -> "GroupRingElem":
        a, m = self._align(GroupRingElem.monomial(lam))
        (k,) = m.terms
        return GroupRingElem(a.rank, K.shift(a.terms, k, coeff), a.scale)

    def __eq__(self, other):
        if isinstance(other, int):
            other = GroupRingElem.constant(self.rank, other)
        if not isinstance(other, GroupRingElem):
            return NotImplemented
        if self.rank != other.rank:
            return False
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.rank, self.scale, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in list(self.items())[:8]:
            parts.append(f"{c}*e^({','.join(map(str, w.coords))}{'' if w.scale == 1 else '/' + str(w.scale)})")
        more = "" if len(self.terms) <= 8 else f" + ... ({len(self.terms)} terms)"
        return " + ".join(parts) + more

    def weyl_act(self, w) -> "GroupRingElem":
        return GroupRingElem(self.rank, K.act(self.terms, w.matrix, self.rank), self.scale)

    def exact_divide(self, g: "GroupRingElem") -> "GroupRingElem":
        return exact_divide(self, g)

    # serialization -------------------------------------------------------
    def dumps(self) -> str:
        lines = [f"rank {self.rank} scale {self.scale} terms {len(self.terms)}"]
        for k in sorted(self.terms):
            coords = ",".join(map(str, K.unpack(k, self.rank)))
            lines.append(f"({coords};{self.scale}) -> {self.terms[k]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "GroupRingElem":
        lines = text.strip("\n").split("\n")
        head = lines[0].split()
        rank, scale, n = int(head[1]), int(head[3]), int(head[5])
        terms = {}
        for line in lines[1:]:
            lhs, rhs = line.split(" -> ")
            coords, s = lhs.strip("()").split(";")
            if int(s) != scale:
                raise ValueError("inconsistent scale in serialized element")
            terms[K.pack(tuple(int(c) for c in coords.split(",")))] = int(rhs)
        if len(terms) != n:
            raise ValueError("term count mismatch in serialized element")
        return cls(rank, terms, scale)


def exact_divide(f: GroupRingElem, g: GroupRingElem) -> GroupRingElem:
    """h with f = g*h, by elimination of the lexicographically largest term."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero in Z[P]")
    f, g = f._align(g)
    if len(g.terms) == 1:
        ((kg, cg),) = g.terms.items()
        out = {}
        for k, v in f.terms.items():
            q, r = divmod(v, cg)
            if r:
                raise NotDivisible("coefficient not divisible")
            out[k - kg] = q
        return GroupRingElem(f.rank, out, f.scale)
    quot = K.exact_quotient(f.terms, g.terms, f.rank)
    if quot is None:
        raise NotDivisible("remainder term cannot be eliminated")
    return GroupRingElem(f.rank, quot, f.scale)


# ---------------------------------------------------------------------------
# fractions


def _orient(m: int):
    """Return (canonical m, numerator shift, sign) with 1-x^m = sign*x^shift*(1-x^canonical)."""
    if m > 0:
        return m, 0, 1
    if m == 0:
        raise DivisionByZeroFraction("factor 1 - e^0 in a denominator")
    return -m, m, -1


class GeoFraction:
    """numerator / prod (1 - e^mu)^k, denominators kept factored."""

    __slots__ = ("rank", "scale", "num", "den")

    def __init__(self, rank: int, num: dict, den: Counter | None = None, scale: int = 1):
        self.rank = rank
        self.scale = scale
        self.num = num
        self.den = Counter() if den is None else den

    @classmethod
    def from_elem(cls, f: GroupRingElem) -> "GeoFraction":
        return cls(f.rank, dict(f.terms), Counter(), f.scale)

    @classmethod
    def one(cls, rank: int) -> "GeoFraction":
        return cls(rank, {0: 1})

    @classmethod
    def zero(cls, rank: int) -> "GeoFraction":
        return cls(rank, {})

    @classmethod
    def build(cls, numerator: GroupRingElem, factors: Iterable[Weight]) -> "GeoFraction":
        """numerator / prod_{mu in factors} (1 - e^mu)."""
        rank = numerator.rank
        scale = numerator.scale
        factors = list(factors)
        for mu in factors:
            scale = _lcm(scale, mu.scale)
        num = numerator._rescaled(scale).terms
        den: Counter = Counter()
        sh, sg = 0, 1
        for mu in factors:
            m = K.pack(tuple(x * (scale // mu.scale) for x in mu.coords))
            c, s, g = _orient(m)
            den[c] += 1
            sh -= s
            sg *= g
        if sh or sg != 1:
            num = K.shift(num, sh, sg)
        return cls(rank, dict(num), den, scale)

    @classmethod
    def inverse_binomial(cls, mu: Weight) -> "GeoFraction":
        return cls.build(GroupRingElem.one(mu.rank), [mu])

    def copy(self) -> "GeoFraction":
        return GeoFraction(self.rank, dict(self.num), Counter(self.den), self.scale)

    def numerator(self) -> GroupRingElem:
        return GroupRingElem(self.rank, self.num, self.scale)

    def denominator_factors(self) -> list[Weight]:
        out = []
        for m in sorted(self.den):
            out += [Weight(K.unpack(m, self.rank), self.scale)] * self.den[m]
        return out

    def degree(self) -> int:
        return sum(self.den.values())

    def is_zero(self) -> bool:
        return not self.num

    def _rescaled(self, scale: int) -> "GeoFraction":
        if scale == self.scale:
            return self
        f = scale // self.scale
        return GeoFraction(
            self.rank,
            {k * f: v for k, v in self.num.items()},
            Counter({m * f: c for m, c in self.den.items()}),
            scale,
        )

    def _align(self, other: "GeoFraction"):
        if self.scale == other.scale:
            return self, other
        s = _lcm(self.scale, other.scale)
        return self._rescaled(s), other._rescaled(s)

    @staticmethod
    def _coerce(x, rank):
        if isinstance(x, GeoFraction):
            return x
        if isinstance(x, GroupRingElem):
            return GeoFraction.from_elem(x)
        if isinstance(x, int):
            return GeoFraction(rank, {0: x} if x else {})
        return NotImplemented

    # arithmetic ---------------------------------------------------------
    def add(self, other: "GeoFraction", sign: int = 1, normalize: bool = True) -> "GeoFraction":
        a, b = self._align(other)
        if not b.num:
            return a if not normalize else a.normalized()
        if not a.num:
            out = GeoFraction(b.rank, K.shift(b.num, 0, sign), Counter(b.den), b.scale)
            return out.normalized() if normalize else out
        den = a.den | b.den
        na = a.num
        for m, c in (den - a.den).items():
            for _ in range(c):
                na = K.mul_binomial(na, m)
        nb = b.num
        for m, c in (den - b.den).items():
            for _ in range(c):
                nb = K.mul_binomial(nb, m)
        num = K.add_scaled(na, nb, sign)
        out = GeoFraction(a.rank, num, den, a.scale)
        return out.normalized() if normalize else out

    def __add__(self, other):
        other = self._coerce(other, self.rank)
        if other is NotImplemented:
            return other
        return self.add(other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other, self.rank)
        if other is NotImplemented:
            return other
        return self.add(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GeoFraction(self.rank, {k: -v for k, v in self.num.items()}, Counter(self.den), self.scale)

    def mul(self, other: "GeoFraction", normalize: bool = True) -> "GeoFraction":
        a, b = self._align(other)
        if not a.num or not b.num:
            return GeoFraction(a.rank, {}, Counter(), a.scale)
        out = GeoFraction(a.rank, K.mul(a.num, b.num), a.den + b.den, a.scale)
        return out.normalized() if normalize else out

    def __mul__(self, other):
        other = self._coerce(other, self.rank)
        if other is NotImplemented:
            return other
        return self.mul(other)

    __rmul__ = __mul__

    def times_monomial(self, lam: Weight, coeff: int = 1) -> "GeoFraction":
        a = self._rescaled(_lcm(self.scale, lam.scale))
        k = K.pack(tuple(x * (a.scale // lam.scale) for x in lam.coords))
        return GeoFraction(a.rank, K.shift(a.num, k, coeff), Counter(a.den), a.scale)

    def divide_by_binomial(self, mu: Weight) -> "GeoFraction":
        return self.mul(GeoFraction.inverse_binomial(mu), normalize=False)

    def normalized(self) -> "GeoFraction":
        """Cancel every denominator factor that exactly divides the numerator."""
        if not self.num:
            return GeoFraction(self.rank, {}, Counter(), self.scale)
        num = self.num
        den = Counter()
        for m in sorted(self.den):
            c = self.den[m]
            while c:
                q = K.div_binomial(num, m)
                if q is None:
                    break
                num = q
                c -= 1
            if c:
                den[m] = c
        return GeoFraction(self.rank, num, den, self.scale)

    def is_normalized(self) -> bool:
        return all(K.div_binomial(self.num, m) is None for m in self.den) if self.num else not self.den

    def __eq__(self, other):
        other = self._coerce(other, self.rank)
        if other is NotImplemented:
            return other
        return self.add(other, -1, normalize=False).is_zero()

    __hash__ = None

    def weyl_act(self, w) -> "GeoFraction":
        num = K.act(self.num, w.matrix, self.rank)
        den = Counter()
        sh, sg = 0, 1
        for m, c in self.den.items():
            e = K.unpack(m, self.rank)
            img = K.pack(w.apply_coords(e))
            cm, s, g = _orient(img)
            den[cm] += c
            sh -= s * c
            if g < 0 and c % 2:
                sg = -sg
        if sh or sg != 1:
            num = K.shift(num, sh, sg)
        return GeoFraction(self.rank, num, den, self.scale)

    def to_elem(self) -> GroupRingElem:
        f = self.normalized()
        if f.den:
            raise NotDivisible("fraction is not a Laurent polynomial")
        return GroupRingElem(self.rank, f.num, self.scale)

    def __repr__(self):
        return f"GeoFraction({len(self.num)} terms / {self.degree()} factors)"


def weyl_act(w, f):
    return f.weyl_act(w)


def accumulate(fractions: Iterable[GeoFraction], signs: Iterable[int] | None = None,
               normalize_every: int = 1) -> GeoFraction:
    """Sequential sum with normalization after every ``normalize_every`` additions."""
    fr = list(fractions)
    sg = [1] * len(fr) if signs is None else list(signs)
    if not fr:
        raise ValueError("empty sum")
    acc = GeoFraction(fr[0].rank, {}, Counter(), fr[0].scale)
    for i, (x, s) in enumerate(zip(fr, sg)):
        acc = acc.add(x, s, normalize=((i + 1) % normalize_every == 0))
    return acc.normalized()


# ---------------------------------------------------------------------------
# evaluation modulo a prime


def random_point(rank: int, rng: random.Random, p: int = DEFAULT_PRIME) -> tuple[int, ...]:
    return tuple(rng.randrange(1, p) for _ in range(rank))


def eval_at(f, point, p: int = DEFAULT_PRIME) -> int:
    """Image of f under e^{omega_j / scale} -> point[j] (mod p)."""
    if isinstance(f, GroupRingElem):
        return K.eval_mod(f.terms, point, f.rank, p)
    num = K.eval_mod(f.num, point, f.rank, p)
    den = 1
    for m, c in f.den.items():
        v = (1 - K.eval_mod({m: 1}, point, f.rank, p)) % p
        if v == 0:
            raise UnluckyPoint("denominator vanishes at the sample point")
        den = den * pow(v, c, p) % p
    return num * pow(den, -1, p) % p


def random_eval(f, seed: int, p: int = DEFAULT_PRIME, attempts: int = 20) -> int:
    rng = random.Random(seed)
    for _ in range(attempts):
        point = random_point(f.rank, rng, p)
        try:
            return eval_at(f, point, p)
        except UnluckyPoint:
            continue
    raise UnluckyPoint(f"no admissible point after {attempts} attempts")
