"""The polyhedral side: multiplicity generating functions, per-w partial
fractions in t, vanishing of the non-simple pole parts, and residues D_lam.

A spec is a factored generating function

    1 / prod_i (1 - e^{lam_i} t^{d_i})^{p_i}

whose t^m coefficient, read as a multiplicity polynomial in the e^{lam_i}
and pushed through the Weyl character formula, gives P_m.  For a Weyl
element w the same product with lam_i -> w(lam_i) is a rational function of
t over K; its partial fractions are computed here factor by factor.
"""
from __future__ import annotations

import ast
import itertools
import json
import operator
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable, Mapping, Sequence

from . import kernels as K
from .charformula import character, divide_by_denominator, signed_orbit
from .groupring import DEFAULT_PRIME, GeoFraction, GroupRingElem, eval_at
from .qsystem import delta_fraction
from .rootsys import RootSystem, Weight, build_root_system
from .weylgrp import WeylElement, weyl_group


class CoprimalityFailure(ArithmeticError):
    pass


class VanishingFailure(AssertionError):
    def __init__(self, msg: str, remainder=None):
        super().__init__(msg)
        self.remainder = remainder


class FormulaError(ValueError):
    pass


class UnknownSpec(LookupError):
    pass


# ---------------------------------------------------------------------------
# multiplicity formulas: a tiny arithmetic language, parsed with ast


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.FloorDiv: operator.floordiv, ast.Mod: operator.mod}
_CMPOPS = {ast.Lt: operator.lt, ast.LtE: operator.le, ast.Gt: operator.gt,
           ast.GtE: operator.ge, ast.Eq: operator.eq}
_FUNCS = {"min": min, "max": max, "abs": abs}


def compile_formula(text: str) -> Callable[[Mapping[str, int]], int]:
    """Integer expression over named variables with + - * // % min max abs and comparisons."""
    try:
        tree = ast.parse(text, mode="eval").body
    except SyntaxError as exc:
        raise FormulaError(f"cannot parse {text!r}") from exc

    def ev(node, env):
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise FormulaError(f"unknown variable {node.id}")
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, env), ev(node.right, env))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand, env)
        if isinstance(node, ast.Compare) and len(node.ops) == 1 and type(node.ops[0]) in _CMPOPS:
            return int(_CMPOPS[type(node.ops[0])](ev(node.left, env), ev(node.comparators[0], env)))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            return _FUNCS[node.func.id](*(ev(a, env) for a in node.args))
        raise FormulaError(f"unsupported syntax in {text!r}")

    _check_syntax(tree, text)
    return lambda env: ev(tree, env)


def _check_syntax(node, text: str):
    """Reject anything the evaluator does not support before it is ever run."""
    ok = (
        (isinstance(node, ast.Constant) and isinstance(node.value, int))
        or isinstance(node, ast.Name)
        or (isinstance(node, ast.BinOp) and type(node.op) in _BINOPS)
        or (isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub))
        or (isinstance(node, ast.Compare) and len(node.ops) == 1 and type(node.ops[0]) in _CMPOPS)
        or (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
            and not node.keywords)
    )
    if not ok:
        raise FormulaError(f"unsupported syntax in {text!r}")
    children = {
        ast.BinOp: lambda n: (n.left, n.right),
        ast.UnaryOp: lambda n: (n.operand,),
        ast.Compare: lambda n: (n.left, *n.comparators),
        ast.Call: lambda n: tuple(n.args),
    }.get(type(node), lambda n: ())
    for child in children(node):
        _check_syntax(child, text)


# ---------------------------------------------------------------------------
# spec


@dataclass(frozen=True)
class Factor:
    weight: Weight
    tdeg: int
    power: int


@dataclass
class PolyhedralSpec:
    ctype: str
    node: int
    factors: list[Factor]
    variables: list[str] = field(default_factory=list)
    constraint: str | None = None
    formula: str | None = None

    @classmethod
    def from_dict(cls, data: Mapping) -> "PolyhedralSpec":
        facs = [Factor(Weight(tuple(f["weight"])), int(f["tdeg"]), int(f["power"])) for f in data["factors"]]
        mult = data.get("multiplicity", {})
        return cls(data["type"], int(data["node"]), facs, list(mult.get("variables", [])),
                   mult.get("constraint"), mult.get("formula"))

    @classmethod
    def load(cls, path=None) -> "PolyhedralSpec":
        if path is None:
            return cls.packaged("F4", 2)
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def packaged(cls, ctype: str, node: int) -> "PolyhedralSpec":
        res = resources.files("krpoly.data").joinpath(f"{str(ctype).lower()}_node{node}.json")
        if not res.is_file():
            raise UnknownSpec(f"no polyhedral formula packaged for {ctype} node {node}")
        with res.open() as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        out = {
            "type": self.ctype,
            "node": self.node,
            "factors": [{"weight": list(f.weight.coords), "tdeg": f.tdeg, "power": f.power} for f in self.factors],
        }
        if self.formula:
            out["multiplicity"] = {"variables": self.variables, "constraint": self.constraint, "formula": self.formula}
        return out

    @property
    def root_system(self) -> RootSystem:
        return build_root_system(self.ctype)

    def lattice_weights(self) -> list[Weight]:
        """Distinct nonzero factor weights, in order: the lam_j of the multiplicity variables."""
        out = []
        for f in self.factors:
            if not f.weight.is_zero() and f.weight not in out:
                out.append(f.weight)
        return out

    def with_power(self, index: int, power: int) -> "PolyhedralSpec":
        facs = list(self.factors)
        f = facs[index]
        facs[index] = Factor(f.weight, f.tdeg, power)
        return PolyhedralSpec(self.ctype, self.node, facs, self.variables, self.constraint, self.formula)

    def with_formula(self, formula: str) -> "PolyhedralSpec":
        return PolyhedralSpec(self.ctype, self.node, list(self.factors), self.variables, self.constraint, formula)

    def validate(self):
        R = self.root_system
        for f in self.factors:
            if not f.weight.is_dominant():
                raise ValueError(f"factor weight {f.weight} is not dominant")
            if f.tdeg < 1 or f.power < 1:
                raise ValueError("t-degree and power must be positive")
        if any(len(f.weight.coords) != R.rank for f in self.factors):
            raise ValueError("weight rank does not match the type")


# ---------------------------------------------------------------------------
# P_m by two routes


def multiplicities_direct(spec: PolyhedralSpec, m: int) -> dict[Weight, int]:
    """Lattice-point sum: {sum_i j_i lam_i: p(j)} over the constraint region."""
    if not spec.formula:
        raise FormulaError("spec carries no explicit multiplicity formula")
    lams = spec.lattice_weights()
    names = spec.variables or [f"j{i + 1}" for i in range(len(lams))]
    if len(names) != len(lams):
        raise FormulaError("variable count does not match the distinct factor weights")
    p = compile_formula(spec.formula)
    cons = compile_formula(spec.constraint) if spec.constraint else (lambda env: 1)
    out: dict[Weight, int] = {}
    zero = Weight.zero(len(lams[0].coords))
    for js in itertools.product(range(m + 1), repeat=len(lams)):
        env = dict(zip(names, js))
        env["m"] = m
        if not cons(env):
            continue
        c = p(env)
        if not c:
            continue
        nu = zero
        for j, lam in zip(js, lams):
            if j:
                nu = nu + lam * j
        out[nu] = out.get(nu, 0) + c
    return {k: v for k, v in out.items() if v}


def multiplicities_series(spec: PolyhedralSpec, m: int) -> dict[Weight, int]:
    """t^m coefficient of the factored generating function, as {weight: multiplicity}."""
    # state: dict (t-degree, weight) -> coefficient, truncated at t^m
    rank = spec.root_system.rank
    state = {(0, Weight.zero(rank)): 1}
    for f in spec.factors:
        for _ in range(f.power):
            new: dict = {}
            for (deg, w), c in state.items():
                k = 0
                while deg + k * f.tdeg <= m:
                    key = (deg + k * f.tdeg, w + f.weight * k)
                    new[key] = new.get(key, 0) + c
                    k += 1
            state = new
    return {w: c for (deg, w), c in state.items() if deg == m and c}


def character_sum(R: RootSystem, mults: Mapping[Weight, int]) -> GroupRingElem:
    out = GroupRingElem.zero(R.rank)
    for w, c in sorted(mults.items()):
        out = out + character(R, w).value * c
    return out


def p_m_direct(spec: PolyhedralSpec, m: int) -> GroupRingElem:
    return character_sum(spec.root_system, multiplicities_direct(spec, m))


def p_m_series(spec: PolyhedralSpec, m: int) -> GroupRingElem:
    """Alternating Weyl sum of the multiplicity polynomial, divided by Delta once."""
    R = spec.root_system
    num: dict = {}
    for nu, c in multiplicities_series(spec, m).items():
        for mu, s in signed_orbit(R, nu + R.rho).items():
            k = K.pack(mu.coords)
            num[k] = num.get(k, 0) + s * c
    num = {k: v for k, v in num.items() if v}
    return divide_by_denominator(R, GroupRingElem(R.rank, num))


# ---------------------------------------------------------------------------
# partial fractions in t for one Weyl element


@dataclass
class PartialFractionRow:
    """Pole parts of prod_i (1 - e^{w lam_i} t^{d_i})^{-p_i}, keyed by factor index.

    simple_parts[i]: coefficient of 1/(1 - e^{w lam_i} t) (linear factors);
    double_part[i]: coefficient of 1/(1 - e^{w lam_i} t)^2 (power-2 linear factors);
    quad_parts[i]: (a, b) with numerator a + b t over 1 - e^{w lam_i} t^2.
    """

    w: WeylElement
    images: list[Weight]
    simple_parts: dict[int, GeoFraction] = field(default_factory=dict)
    double_part: dict[int, GeoFraction] = field(default_factory=dict)
    quad_parts: dict[int, tuple[GeoFraction, GeoFraction]] = field(default_factory=dict)


def _images(spec: PolyhedralSpec, w: WeylElement) -> list[Weight]:
    return [w.apply(f.weight) for f in spec.factors]


def _check_coprime(spec: PolyhedralSpec, imgs: Sequence[Weight]):
    for i, j in itertools.combinations(range(len(imgs)), 2):
        di, dj = spec.factors[i].tdeg, spec.factors[j].tdeg
        # roots of 1 - y t^d are the d-th roots of e^{-mu}; they meet iff dj*mu_i == di*mu_j
        # and (for d = 2 against d = 1) the sign branch agrees, which we treat as a failure too
        if imgs[i] * dj == imgs[j] * di:
            raise CoprimalityFailure(f"factors {i} and {j} share a root for images {imgs[i]}, {imgs[j]}")


def _linear_simple_part(spec, imgs, i, normalize=True) -> GeoFraction:
    """Cover-up at t = e^{-mu_i}: prod_{k != i} (1 - e^{mu_k - d_k mu_i})^{-p_k}."""
    mu = imgs[i]
    facs = []
    for k, f in enumerate(spec.factors):
        if k == i:
            continue
        facs += [imgs[k] - mu * f.tdeg] * f.power
    rank = len(mu.coords)
    out = GeoFraction.build(GroupRingElem.one(rank), facs)
    return out


def _double_parts(spec, imgs, i) -> tuple[GeoFraction, GeoFraction]:
    """(E, D) for the factor (1 - x t)^2, x = e^{mu_i}: G = E/(1-xt)^2 + D/(1-xt) + ...

    With H = 1/prod_{k != i} and s = 1/x: E = H(s) and
    D = -s H'(s) = -H(s) * sum_k p_k d_k e^{nu_k} / (1 - e^{nu_k}),  e^{nu_k} = x_k s^{d_k}.
    """
    mu = imgs[i]
    rank = len(mu.coords)
    E = _linear_simple_part(spec, imgs, i)
    acc = GeoFraction.zero(rank)
    for k, f in enumerate(spec.factors):
        if k == i:
            continue
        nu = imgs[k] - mu * f.tdeg
        c = f.power * f.tdeg
        acc = acc.add(GeoFraction.build(GroupRingElem.monomial(nu, c), [nu]), normalize=False)
    D = -(E.mul(acc, normalize=False))
    return E, D.normalized()


def _quad_mul(x, y, tsq: Weight):
    """(a1 + b1 t)(a2 + b2 t) modulo t^2 = e^{tsq}."""
    a1, b1 = x
    a2, b2 = y
    bb = b1.mul(b2, normalize=False).times_monomial(tsq)
    return (a1.mul(a2, normalize=False).add(bb, normalize=False),
            a1.mul(b2, normalize=False).add(a2.mul(b1, normalize=False), normalize=False))


def _quad_part(spec, imgs, i) -> tuple[GeoFraction, GeoFraction]:
    """Remainder of prod_{k != i} factors^{-1} modulo 1 - y t^2, y = e^{mu_i}."""
    mu = imgs[i]
    rank = len(mu.coords)
    tsq = -mu
    one = GeoFraction.one(rank)
    zero = GeoFraction.zero(rank)
    acc = (one, zero)
    for k, f in enumerate(spec.factors):
        if k == i:
            continue
        x = imgs[k]
        if f.tdeg == 1:
            # 1/(1 - x t) = (1 + x t)/(1 - x^2 t^2) = (1 + x t)/(1 - e^{2x - mu})
            inv = (GeoFraction.build(GroupRingElem.one(rank), [x * 2 - mu]),
                   GeoFraction.build(GroupRingElem.monomial(x), [x * 2 - mu]))
        elif f.tdeg == 2:
            inv = (GeoFraction.build(GroupRingElem.one(rank), [x - mu]), zero)
        else:
            raise NotImplementedError("t-degree above 2")
        for _ in range(f.power):
            acc = _quad_mul(acc, inv, tsq)
    return acc[0].normalized(), acc[1].normalized()


def partial_fractions_row(spec: PolyhedralSpec, w: WeylElement,
                          parts: Iterable[str] = ("simple", "double", "quad")) -> PartialFractionRow:
    imgs = _images(spec, w)
    _check_coprime(spec, imgs)
    row = PartialFractionRow(w, imgs)
    parts = set(parts)
    for i, f in enumerate(spec.factors):
        if f.tdeg == 1 and f.power == 1:
            if "simple" in parts:
                row.simple_parts[i] = _linear_simple_part(spec, imgs, i)
        elif f.tdeg == 1 and f.power == 2:
            if parts & {"simple", "double"}:
                E, D = _double_parts(spec, imgs, i)
                row.double_part[i] = E
                row.simple_parts[i] = D
        elif f.tdeg == 2 and f.power == 1:
            if "quad" in parts:
                row.quad_parts[i] = _quad_part(spec, imgs, i)
        else:
            raise NotImplementedError(f"factor shape (tdeg={f.tdeg}, power={f.power})")
    return row


def _series_add(acc: list[GeoFraction], k: int, f: GeoFraction):
    if k < len(acc):
        acc[k] = acc[k].add(f, normalize=False)


def resum_identity(spec: PolyhedralSpec, row: PartialFractionRow) -> bool:
    """Exact check that the parts re-sum to the original product.

    Both sides are proper with the same denominator Den(t) of degree n, so
    Den(t) * (sum of parts) is a polynomial of degree < n; it equals 1 iff
    its first n coefficients are (1, 0, ..., 0).
    """
    imgs = row.images
    rank = len(imgs[0].coords)
    n = sum(f.tdeg * f.power for f in spec.factors)
    S = [GeoFraction.zero(rank) for _ in range(n)]
    for i, D in row.simple_parts.items():
        for k in range(n):
            _series_add(S, k, D.times_monomial(imgs[i] * k))
    for i, E in row.double_part.items():
        for k in range(n):
            _series_add(S, k, E.times_monomial(imgs[i] * k, k + 1))
    for i, (a, b) in row.quad_parts.items():
        for k in range(0, n, 2):
            _series_add(S, k, a.times_monomial(imgs[i] * (k // 2)))
            _series_add(S, k + 1, b.times_monomial(imgs[i] * (k // 2)))
    # Den(t) coefficients as Laurent polynomials
    den = [GroupRingElem.one(rank)]
    for i, f in enumerate(spec.factors):
        for _ in range(f.power):
            fac = [GroupRingElem.one(rank)] + [GroupRingElem.zero(rank)] * (f.tdeg - 1) + [-GroupRingElem.monomial(imgs[i])]
            new = [GroupRingElem.zero(rank) for _ in range(len(den) + len(fac) - 1)]
            for a, x in enumerate(den):
                for b, y in enumerate(fac):
                    if not x.is_zero() and not y.is_zero():
                        new[a + b] = new[a + b] + x * y
            den = new
    for k in range(n):
        tot = GeoFraction.zero(rank)
        for a in range(k + 1):
            if den[a].is_zero() or S[k - a].is_zero():
                continue
            tot = tot.add(S[k - a].mul(GeoFraction.from_elem(den[a]), normalize=False), normalize=False)
        target = 1 if k == 0 else 0
        if not tot.add(GeoFraction(rank, {0: target} if target else {}), -1, normalize=False).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# alternating stabilizer sums


def _signed_rho(R: RootSystem, w: WeylElement) -> GroupRingElem:
    return GroupRingElem.monomial(w.apply(R.rho), w.sign)


def factor_index(spec: PolyhedralSpec, lam: Weight, kind: str) -> int:
    for i, f in enumerate(spec.factors):
        if f.weight != lam:
            continue
        if kind == "linear" and f.tdeg == 1:
            return i
        if kind == "quad" and f.tdeg == 2:
            return i
        if kind == "double" and f.tdeg == 1 and f.power == 2:
            return i
    raise KeyError(f"no {kind} factor with weight {lam}")


def e_part(spec: PolyhedralSpec, w: WeylElement, i: int) -> list[GeoFraction]:
    """e^{w rho} (-1)^l(w) times the non-simple part of factor i, as t-coefficients."""
    R = spec.root_system
    imgs = _images(spec, w)
    _check_coprime(spec, imgs)
    f = spec.factors[i]
    sr = GeoFraction.from_elem(_signed_rho(R, w))
    if f.tdeg == 2:
        a, b = _quad_part(spec, imgs, i)
        return [sr.mul(a, normalize=False), sr.mul(b, normalize=False)]
    if f.power == 2:
        return [sr.mul(_linear_simple_part(spec, imgs, i), normalize=False)]
    raise ValueError("factor has no non-simple part")


def sum_fractions(fracs: Sequence[GeoFraction], chunk: int = 8) -> GeoFraction:
    """Tree reduction with normalization after every merge."""
    if not fracs:
        raise ValueError("empty sum")
    level = [f.normalized() for f in fracs]
    while len(level) > 1:
        nxt = []
        for s in range(0, len(level), chunk):
            acc = level[s]
            for g in level[s + 1: s + chunk]:
                acc = acc.add(g)
            nxt.append(acc)
        level = nxt
    return level[0]


def e_sum(spec: PolyhedralSpec, i: int, elements: Sequence[WeylElement]) -> list[GeoFraction]:
    parts = [e_part(spec, w, i) for w in elements]
    return [sum_fractions([p[c] for p in parts]) for c in range(len(parts[0]))]


def _is_zero_vec(v: Sequence[GeoFraction]) -> bool:
    return all(x.is_zero() for x in v)


@dataclass
class VanishingCertificate:
    weight: Weight
    factor: int
    route: str
    subgroup: list[int]
    parent: list[int]
    coset_count: int = 0
    pairs: list[tuple[str, str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "weight": list(self.weight.coords),
            "factor": self.factor,
            "route": self.route,
            "subgroup": self.subgroup,
            "parent": self.parent,
            "coset_count": self.coset_count,
            "pairs": [list(p) for p in self.pairs],
        }


_DOCUMENTED = {
    # (weight coords, kind) -> (subgroup, route)
    ((0, 0, 2, 0), "quad"): ({1, 2}, "parabolic"),
    ((0, 1, 0, 0), "quad"): ({1, 3}, "parabolic"),
    ((1, 0, 0, 0), "double"): ({2, 4}, "pairing"),
}


def _pairing(images: list[list[GeoFraction]]):
    """Match images into pairs summing to zero; None if impossible."""
    n = len(images)
    if n % 2:
        return None
    partner: dict[int, list[int]] = {i: [] for i in range(n)}
    for i, j in itertools.combinations(range(n), 2):
        s = [a.add(b, normalize=False) for a, b in zip(images[i], images[j])]
        if _is_zero_vec(s):
            partner[i].append(j)
            partner[j].append(i)

    # perfect matching by backtracking; the candidate graphs are tiny
    def solve(free: list[int]):
        if not free:
            return []
        i = free[0]
        for j in partner[i]:
            if j in free:
                rest = solve([k for k in free if k not in (i, j)])
                if rest is not None:
                    return [(i, j)] + rest
        return None

    return solve(list(range(n)))


def _try_parabolic(spec, i, J, parent, W) -> VanishingCertificate | None:
    inner = e_sum(spec, i, W.enumerate_parabolic(J))
    if _is_zero_vec(inner):
        reps = W.min_coset_reps(J, parent)
        return VanishingCertificate(spec.factors[i].weight, i, "parabolic", sorted(J), sorted(parent), len(reps))
    return None


def _try_pairing(spec, i, J, parent, W) -> VanishingCertificate | None:
    inner = e_sum(spec, i, W.enumerate_parabolic(J))
    reps = W.min_coset_reps(J, parent)
    images = []
    for v in reps:
        img = [x.weyl_act(v) for x in inner]
        if v.sign < 0:
            img = [-x for x in img]
        images.append(img)
    match = _pairing(images)
    if match is None:
        return None
    pairs = [(repr(reps.reps[a]), repr(reps.reps[b])) for a, b in match]
    return VanishingCertificate(spec.factors[i].weight, i, "pairing", sorted(J), sorted(parent), len(reps), pairs)


def check_E_vanishing(spec: PolyhedralSpec, lam: Weight, documented_first: bool = True) -> VanishingCertificate:
    """Certify sum_{w in W_lam} (-1)^l(w) e^{w rho} E_{w;lam} = 0.

    Tries the known reductions, then every standard parabolic subgroup of the
    stabilizer (largest vanishing inner sum wins), then pairings of coset
    images, then the full stabilizer sum.
    """
    R = spec.root_system
    W = weyl_group(R)
    try:
        i = factor_index(spec, lam, "quad")
        kind = "quad"
    except KeyError:
        i = factor_index(spec, lam, "double")
        kind = "double"
    parent = W.stabilizer_nodes(lam)
    if documented_first and str(R.ctype) == "F4":
        doc = _DOCUMENTED.get((lam.coords, kind))
        if doc is not None:
            J, route = doc
            cert = (_try_parabolic if route == "parabolic" else _try_pairing)(spec, i, J, parent, W)
            if cert is not None:
                return cert
    subsets = [set(c) for r in range(1, len(parent)) for c in itertools.combinations(sorted(parent), r)]
    for J in subsets:
        cert = _try_parabolic(spec, i, J, parent, W)
        if cert is not None:
            return cert
    for J in subsets:
        cert = _try_pairing(spec, i, J, parent, W)
        if cert is not None:
            return cert
    total = e_sum(spec, i, W.enumerate_parabolic(parent))
    if _is_zero_vec(total):
        return VanishingCertificate(lam, i, "full", sorted(parent), sorted(parent), 1)
    raise VanishingFailure(f"non-simple part at {lam} does not vanish", total)


# ---------------------------------------------------------------------------
# residues D_lam


def d_part(spec: PolyhedralSpec, w: WeylElement, i: int) -> GeoFraction:
    """(-1)^l(w) e^{w rho} D_{w;lam_i} for a linear factor i."""
    R = spec.root_system
    imgs = _images(spec, w)
    _check_coprime(spec, imgs)
    f = spec.factors[i]
    if f.power == 1:
        D = _linear_simple_part(spec, imgs, i)
    else:
        _, D = _double_parts(spec, imgs, i)
    return GeoFraction.from_elem(_signed_rho(R, w)).mul(D, normalize=False)


def d_numerator(spec: PolyhedralSpec, lam: Weight, elements: Sequence[WeylElement] | None = None,
                chunk: int = 8) -> GeoFraction:
    """Delta * D_lam = sum_{w in W_lam} (-1)^l(w) e^{w rho} D_{w;lam}."""
    R = spec.root_system
    W = weyl_group(R)
    i = factor_index(spec, lam, "linear")
    if elements is None:
        elements = W.enumerate_parabolic(W.stabilizer_nodes(lam))
    return sum_fractions([d_part(spec, w, i) for w in elements], chunk)


def coeff_D(spec: PolyhedralSpec, lam: Weight, chunk: int = 8):
    from .qsystem import ResidueCoeff, PoleSpec
    R = spec.root_system
    return ResidueCoeff(PoleSpec(lam), d_numerator(spec, lam, chunk=chunk).mul(delta_fraction(R)))


def d_zero_by_cosets(spec: PolyhedralSpec, J: Iterable[int] = (1, 3, 4), chunk: int = 8,
                     progress: Callable[[int, GeoFraction], None] | None = None,
                     limit_terms: int | None = None) -> GeoFraction | None:
    """Delta * D_0 as sum over minimal coset representatives v of v(inner sum over W_J).

    Returns None when an intermediate numerator exceeds ``limit_terms``.
    """
    R = spec.root_system
    W = weyl_group(R)
    i = factor_index(spec, R.zero(), "linear")
    inner = sum_fractions([d_part(spec, u, i) for u in W.enumerate_parabolic(set(J))], chunk)
    reps = list(W.min_coset_reps(set(J)))
    images = []
    for v in reps:
        img = inner.weyl_act(v)
        images.append(-img if v.sign < 0 else img)
    level = images
    step = 0
    while len(level) > 1:
        nxt = []
        for s in range(0, len(level), chunk):
            acc = level[s]
            for g in level[s + 1: s + chunk]:
                acc = acc.add(g)
                step += 1
                if progress:
                    progress(step, acc)
                if limit_terms is not None and len(acc.num) > limit_terms:
                    return None
            nxt.append(acc)
        level = nxt
    return level[0]


def eval_d_numerator(spec: PolyhedralSpec, lam: Weight, point, p: int = DEFAULT_PRIME) -> int:
    """Delta * D_lam at a point mod p, summing the stabilizer terms numerically."""
    R = spec.root_system
    W = weyl_group(R)
    i = factor_index(spec, lam, "linear")
    total = 0
    for w in W.enumerate_parabolic(W.stabilizer_nodes(lam)):
        total += eval_at(d_part(spec, w, i), point, p)
    return total % p
