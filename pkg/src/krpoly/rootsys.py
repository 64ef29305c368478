"""Root data for the simple Lie algebras of type A-D, F4 and G2.

Simple roots are realized in a Euclidean space (Bourbaki numbering) and the
Cartan matrix is read off from the inner products, so the node labeling is
fixed by which simple roots are long.  In F4 the long simple roots are
alpha_1, alpha_2 and the highest root is omega_1.

Weights are stored as integer coordinates in the fundamental weight basis.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Sequence


class UnsupportedType(ValueError):
    pass


class NotInRootLattice(ValueError):
    pass


@dataclass(frozen=True)
class CartanType:
    family: str
    rank: int

    def __post_init__(self):
        fam, r = self.family, self.rank
        if fam == "E":
            raise UnsupportedType(f"type E{r} is not supported")
        if fam not in "ABCDFG" or len(fam) != 1:
            raise UnsupportedType(f"unknown family {fam!r}")
        ok = {
            "A": r >= 1,
            "B": r >= 2,
            "C": r >= 2,
            "D": r >= 4,
            "F": r == 4,
            "G": r == 2,
        }[fam]
        if not ok:
            raise UnsupportedType(f"invalid rank {r} for family {fam}")

    @classmethod
    def parse(cls, text: str) -> "CartanType":
        m = re.fullmatch(r"\s*([A-Za-z])\s*_?(\d+)\s*", text)
        if not m:
            raise UnsupportedType(f"cannot parse Cartan type {text!r}")
        return cls(m.group(1).upper(), int(m.group(2)))

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


@dataclass(frozen=True, order=True)
class Weight:
    """Point of the weight lattice, or of (1/scale) times it."""

    coords: tuple[int, ...]
    scale: int = 1

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        scale = int(self.scale)
        if scale <= 0:
            raise ValueError("scale must be positive")
        g = scale
        for c in coords:
            g = gcd(g, c)
        if g > 1:
            coords = tuple(c // g for c in coords)
            scale //= g
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "scale", scale)

    @classmethod
    def fundamental(cls, rank: int, a: int) -> "Weight":
        return cls(tuple(1 if i == a - 1 else 0 for i in range(rank)))

    @classmethod
    def zero(cls, rank: int) -> "Weight":
        return cls((0,) * rank)

    @property
    def rank(self) -> int:
        return len(self.coords)

    def _common(self, other: "Weight"):
        s = self.scale * other.scale // gcd(self.scale, other.scale)
        a = [c * (s // self.scale) for c in self.coords]
        b = [c * (s // other.scale) for c in other.coords]
        return a, b, s

    def __add__(self, other: "Weight") -> "Weight":
        a, b, s = self._common(other)
        return Weight(tuple(x + y for x, y in zip(a, b)), s)

    def __sub__(self, other: "Weight") -> "Weight":
        a, b, s = self._common(other)
        return Weight(tuple(x - y for x, y in zip(a, b)), s)

    def __neg__(self) -> "Weight":
        return Weight(tuple(-c for c in self.coords), self.scale)

    def __mul__(self, k: int) -> "Weight":
        return Weight(tuple(k * c for c in self.coords), self.scale)

    __rmul__ = __mul__

    def divide(self, k: int) -> "Weight":
        return Weight(self.coords, self.scale * k)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)

    def __str__(self) -> str:
        parts = [f"{c}w{i + 1}" for i, c in enumerate(self.coords) if c]
        body = "+".join(parts).replace("+-", "-") if parts else "0"
        return body if self.scale == 1 else f"({body})/{self.scale}"


def _realization(ct: CartanType) -> list[list[Fraction]]:
    """Simple roots as Euclidean vectors, Bourbaki numbering."""
    n, fam = ct.rank, ct.family
    h = Fraction(1, 2)

    def e(i, dim, c=1):
        v = [Fraction(0)] * dim
        v[i] = Fraction(c)
        return v

    def diff(i, j, dim):
        v = [Fraction(0)] * dim
        v[i] += 1
        v[j] -= 1
        return v

    if fam == "A":
        return [diff(i, i + 1, n + 1) for i in range(n)]
    if fam == "B":
        return [diff(i, i + 1, n) for i in range(n - 1)] + [e(n - 1, n)]
    if fam == "C":
        return [diff(i, i + 1, n) for i in range(n - 1)] + [e(n - 1, n, 2)]
    if fam == "D":
        last = [Fraction(0)] * n
        last[n - 2] = last[n - 1] = Fraction(1)
        return [diff(i, i + 1, n) for i in range(n - 1)] + [last]
    if fam == "F":
        return [diff(1, 2, 4), diff(2, 3, 4), e(3, 4), [h, -h, -h, -h]]
    if fam == "G":
        return [
            [Fraction(1), Fraction(-1), Fraction(0)],
            [Fraction(-2), Fraction(1), Fraction(1)],
        ]
    raise UnsupportedType(str(ct))


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _invert(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(mat)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True, eq=False)
class RootSystem:
    ctype: CartanType
    cartan: tuple[tuple[int, ...], ...]
    # (alpha_a, alpha_b), normalized so that (theta, theta) = 2
    simple_form: tuple[tuple[Fraction, ...], ...]
    positive_roots_simple: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return self.ctype.rank

    @property
    def nodes(self) -> range:
        return range(1, self.rank + 1)

    @cached_property
    def cartan_inverse(self) -> list[list[Fraction]]:
        return _invert([list(row) for row in self.cartan])

    def simple_root(self, a: int) -> Weight:
        return Weight(tuple(self.cartan[i][a - 1] for i in range(self.rank)))

    def from_simple(self, c: Sequence[int]) -> Weight:
        n = self.rank
        return Weight(tuple(sum(self.cartan[i][j] * c[j] for j in range(n)) for i in range(n)))

    @cached_property
    def positive_roots(self) -> tuple[Weight, ...]:
        return tuple(self.from_simple(c) for c in self.positive_roots_simple)

    @cached_property
    def roots(self) -> tuple[Weight, ...]:
        return self.positive_roots + tuple(-a for a in self.positive_roots)

    @cached_property
    def highest_root(self) -> Weight:
        best = max(self.positive_roots_simple, key=sum)
        return self.from_simple(best)

    @cached_property
    def rho(self) -> Weight:
        return Weight((1,) * self.rank)

    @cached_property
    def t(self) -> tuple[int, ...]:
        theta = self.norm2(self.highest_root)
        out = []
        for a in range(self.rank):
            q = theta / self.simple_form[a][a]
            assert q.denominator == 1
            out.append(int(q))
        return tuple(out)

    @cached_property
    def marks(self) -> tuple[int, ...]:
        """The coefficients c_a of the highest root in the simple roots."""
        return tuple(self.expand_in_simple_roots(self.highest_root))

    def pairing(self, lam: Weight, a: int):
        c = lam.coords[a - 1]
        return c if lam.scale == 1 else Fraction(c, lam.scale)

    def simple_coords(self, lam: Weight) -> list[Fraction]:
        inv = self.cartan_inverse
        n = self.rank
        return [sum(inv[i][j] * lam.coords[j] for j in range(n)) / lam.scale for i in range(n)]

    def expand_in_simple_roots(self, alpha: Weight) -> tuple[int, ...]:
        c = self.simple_coords(alpha)
        if any(x.denominator != 1 for x in c):
            raise NotInRootLattice(f"{alpha} is not in the root lattice")
        return tuple(int(x) for x in c)

    def form(self, x: Weight, y: Weight) -> Fraction:
        cx, cy = self.simple_coords(x), self.simple_coords(y)
        B = self.simple_form
        n = self.rank
        return sum(cx[i] * B[i][j] * cy[j] for i in range(n) for j in range(n))

    def norm2(self, x: Weight) -> Fraction:
        return self.form(x, x)

    def fundamental(self, a: int) -> Weight:
        return Weight.fundamental(self.rank, a)

    def weight(self, *coords: int) -> Weight:
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return Weight(tuple(coords))

    def zero(self) -> Weight:
        return Weight.zero(self.rank)


def _close_roots(cartan: list[list[int]]) -> list[tuple[int, ...]]:
    """Positive roots in simple-root coordinates via root strings."""
    n = len(cartan)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for a in range(n):
                # beta(h_a) = sum_b C_ab beta_b
                pair = sum(cartan[a][b] * beta[b] for b in range(n))
                p = 0
                probe = list(beta)
                while True:
                    probe[a] -= 1
                    if tuple(probe) in roots:
                        p += 1
                    else:
                        break
                if p - pair > 0:
                    up = list(beta)
                    up[a] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(roots, key=lambda c: (sum(c), c))


@lru_cache(maxsize=None)
def build_root_system(ctype: CartanType | str) -> RootSystem:
    if isinstance(ctype, str):
        ctype = CartanType.parse(ctype)
    simple = _realization(ctype)
    n = ctype.rank
    gram = [[_dot(simple[i], simple[j]) for j in range(n)] for i in range(n)]
    cartan = []
    for a in range(n):
        row = []
        for b in range(n):
            v = 2 * gram[a][b] / gram[a][a]
            assert v.denominator == 1
            row.append(int(v))
        cartan.append(row)
    pos = _close_roots(cartan)
    theta = max(pos, key=sum)
    theta2 = sum(theta[i] * gram[i][j] * theta[j] for i in range(n) for j in range(n))
    k = 2 / theta2
    form = tuple(tuple(k * x for x in row) for row in gram)
    return RootSystem(
        ctype=ctype,
        cartan=tuple(tuple(r) for r in cartan),
        simple_form=form,
        positive_roots_simple=tuple(pos),
    )
