"""Weyl group elements, orbits, parabolic subgroups and coset representatives."""
from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .rootsys import RootSystem, Weight

Matrix = tuple[tuple[int, ...], ...]


class NotDominant(ValueError):
    pass


class NotASubset(ValueError):
    pass


def _matmul(A: Matrix, B: Matrix) -> Matrix:
    n = len(A)
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _det(M: Matrix) -> int:
    # small integer matrices only; fraction-free Bareiss
    n = len(M)
    A = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


@dataclass(frozen=True, eq=False)
class WeylElement:
    """Reduced word plus the integer matrix of the action on omega-coordinates."""

    word: tuple[int, ...]
    matrix: Matrix

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sign(self) -> int:
        return -1 if len(self.word) % 2 else 1

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def apply(self, lam: Weight) -> Weight:
        return Weight(self.apply_coords(lam.coords), lam.scale)

    def apply_coords(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in self.matrix)

    def __repr__(self):
        return "s" + ("".join(map(str, self.word)) if self.word else "()")


class WeylGroup:
    """Weyl group of a root system acting on the weight lattice."""

    def __init__(self, R: RootSystem):
        self.R = R
        n = R.rank
        self.identity = WeylElement((), tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
        gens = {}
        for a in R.nodes:
            col = [R.cartan[c][a - 1] for c in range(n)]
            M = tuple(
                tuple(int(i == j) - (col[i] if j == a - 1 else 0) for j in range(n)) for i in range(n)
            )
            gens[a] = WeylElement((a,), M)
        self.generators = gens
        self._lock = threading.Lock()
        self._parabolic: dict[frozenset, list[WeylElement]] = {}
        self._cosets: dict[tuple[frozenset, frozenset], list[WeylElement]] = {}

    @property
    def rank(self) -> int:
        return self.R.rank

    def _nodes(self, J: Iterable[int] | None) -> frozenset:
        return frozenset(self.R.nodes) if J is None else frozenset(J)

    def reflect(self, a: int, lam: Weight) -> Weight:
        c = lam.coords
        k = c[a - 1]
        if k == 0:
            return lam
        col = [self.R.cartan[i][a - 1] for i in range(self.rank)]
        return Weight(tuple(x - k * y for x, y in zip(c, col)), lam.scale)

    def multiply(self, u: WeylElement, v: WeylElement) -> WeylElement:
        """u * v; the word is reduced by re-deriving it from the full group."""
        M = _matmul(u.matrix, v.matrix)
        word = self._word_of(M)
        return WeylElement(word, M)

    def inverse(self, w: WeylElement) -> WeylElement:
        return self.from_word(tuple(reversed(w.word)))

    def from_word(self, word: Sequence[int]) -> WeylElement:
        M = self.identity.matrix
        for a in word:
            M = _matmul(M, self.generators[a].matrix)
        return WeylElement(self._word_of(M), M)

    def _word_of(self, M: Matrix) -> tuple[int, ...]:
        table = self._by_matrix()
        return table[M].word

    def _by_matrix(self) -> dict[Matrix, WeylElement]:
        if not hasattr(self, "_matrix_index"):
            self._matrix_index = {w.matrix: w for w in self.elements()}
        return self._matrix_index

    def elements(self) -> list[WeylElement]:
        return self.enumerate_parabolic(None)

    @property
    def order(self) -> int:
        return len(self.elements())

    def enumerate_parabolic(self, J: Iterable[int] | None) -> list[WeylElement]:
        """All elements of W_J in breadth-first (length) order with reduced words."""
        key = self._nodes(J)
        got = self._parabolic.get(key)
        if got is not None:
            return got
        seen = {self.identity.matrix: self.identity}
        order = [self.identity]
        queue = deque([self.identity])
        gens = [self.generators[a] for a in sorted(key)]
        while queue:
            w = queue.popleft()
            for g in gens:
                M = _matmul(w.matrix, g.matrix)
                if M not in seen:
                    x = WeylElement(w.word + g.word, M)
                    seen[M] = x
                    order.append(x)
                    queue.append(x)
        with self._lock:
            self._parabolic.setdefault(key, order)
        return self._parabolic[key]

    def orbit(self, lam: Weight) -> list[Weight]:
        seen = {lam}
        out = [lam]
        queue = deque([lam])
        while queue:
            mu = queue.popleft()
            for a in self.R.nodes:
                nu = self.reflect(a, mu)
                if nu not in seen:
                    seen.add(nu)
                    out.append(nu)
                    queue.append(nu)
        return out

    def dominant_representative(self, lam: Weight) -> tuple[Weight, WeylElement]:
        """Return (mu, w) with mu dominant and w(mu) = lam."""
        mu = lam
        word: list[int] = []
        while True:
            a = next((i + 1 for i, c in enumerate(mu.coords) if c < 0), None)
            if a is None:
                break
            mu = self.reflect(a, mu)
            word.append(a)
        # lam = s_{a1} s_{a2} ... s_{ak} mu
        w = self.from_word(tuple(word))
        return mu, w

    def stabilizer_nodes(self, lam: Weight) -> frozenset:
        if not lam.is_dominant():
            raise NotDominant(f"{lam} is not dominant")
        return frozenset(i + 1 for i, c in enumerate(lam.coords) if c == 0)

    def min_coset_reps(self, J: Iterable[int], parent: Iterable[int] | None = None) -> "CosetTable":
        J = frozenset(J)
        K = self._nodes(parent)
        if not J <= K:
            raise NotASubset(f"{sorted(J)} is not a subset of {sorted(K)}")
        key = (J, K)
        reps = self._cosets.get(key)
        if reps is None:
            # w W_J is determined by w applied to a weight with stabilizer exactly W_J
            probe = tuple(0 if a in J else 1 for a in self.R.nodes)
            groups: dict[tuple[int, ...], list[WeylElement]] = {}
            for w in self.enumerate_parabolic(K):
                groups.setdefault(w.apply_coords(probe), []).append(w)
            reps = []
            for members in groups.values():
                m = min(x.length for x in members)
                shortest = [x for x in members if x.length == m]
                assert len(shortest) == 1, "minimal coset representative is not unique"
                reps.append(shortest[0])
            reps.sort(key=lambda x: (x.length, x.word))
            with self._lock:
                self._cosets.setdefault(key, reps)
            reps = self._cosets[key]
        return CosetTable(subgroup_J=J, parent_J=K, reps=reps)

    def random_element(self, rng) -> WeylElement:
        els = self.elements()
        return els[rng.randrange(len(els))]


@dataclass(frozen=True)
class CosetTable:
    subgroup_J: frozenset
    parent_J: frozenset
    reps: list[WeylElement]

    def __len__(self):
        return len(self.reps)

    def __iter__(self):
        return iter(self.reps)


_groups: dict[str, WeylGroup] = {}
_groups_lock = threading.Lock()


def weyl_group(R: RootSystem) -> WeylGroup:
    key = str(R.ctype)
    with _groups_lock:
        if key not in _groups:
            _groups[key] = WeylGroup(R)
        return _groups[key]
