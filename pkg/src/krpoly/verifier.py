"""End-to-end residue comparison between the Q-system and a polyhedral formula.

Step (i): the non-simple pole parts of the polyhedral generating function
cancel (E-vanishing certificates).  Step (ii): the simple-pole residue data
agree, C_lam = D_lam for every dominant lam in Lambda_a.  Everything else
(spec consistency, pole sets, term checks, evaluations) guards the inputs.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import platform
import random
import sys
import time
import zlib
from pathlib import Path
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import kernels as K
from .cache import CACHE_ENV, DiskCharacterStore, atomic_write
from .charformula import signed_orbit, use_store, weyl_denominator
from .groupring import DEFAULT_PRIME, GeoFraction, GroupRingElem, UnluckyPoint, eval_at, random_point
from .polyform import (PolyhedralSpec, UnknownSpec, VanishingFailure, check_E_vanishing, d_numerator,
                       d_part, d_zero_by_cosets, e_part, factor_index, multiplicities_direct,
                       multiplicities_series, p_m_direct, p_m_series)
from .qsystem import (CharacterQSystem, LambdaTable, PoleSpec, QSystem, check_linear_recurrence,
                      check_linear_recurrence_characters, coeff_C1, coeff_C2, lambda_table, q1_f4,
                      q1_f4_characters, reconstruct_term, residue_from_series)
from .rootsys import RootSystem, Weight, build_root_system
from .weylgrp import weyl_group

PROVED, CONSISTENT, FAILED = "proved", "consistent", "failed"


class TermMismatch(AssertionError):
    def __init__(self, m: int, msg: str = ""):
        super().__init__(msg or f"Q_m != P_m at m = {m}")
        self.m = m


@dataclass
class VerifierConfig:
    ctype: str = "F4"
    node: int = 2
    mode: str = "exact"
    max_term_check: int = 3
    chunk_size: int = 8
    workers: int = 1
    cache_dir: str | None = None
    report_path: str | None = None
    lambda0_route: str = "auto"
    consistency_orders: int = 6
    expansion_orders: int = 4
    reconstruct_orders: int = 6
    recurrence_extra: int = 5
    prob_points: int = 3
    seed: int = 1
    spec_path: str | None = None
    spec: dict | None = None

    def validate(self):
        if self.mode not in ("exact", "prob"):
            raise ValueError("mode must be 'exact' or 'prob'")
        if self.lambda0_route not in ("auto", "closure", "direct"):
            raise ValueError("lambda0_route must be auto, closure or direct")
        if self.chunk_size < 2 or self.workers < 1 or self.prob_points < 1:
            raise ValueError("chunk_size >= 2, workers >= 1, prob_points >= 1 required")
        if self.max_term_check < 0:
            raise ValueError("max_term_check must be non-negative")


@dataclass
class CheckRecord:
    name: str
    status: str
    mandatory: bool
    mode: str
    wall_time: float = 0.0
    witnesses: dict = field(default_factory=dict)


@dataclass
class VerifierReport:
    config: dict
    environment: dict
    checks: list[CheckRecord]
    status: str = FAILED
    wall_time: float = 0.0

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> list[CheckRecord]:
        return [c for c in self.checks if c.status == FAILED]

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "wall_time": self.wall_time,
            "config": self.config,
            "environment": self.environment,
            "checks": [dataclasses.asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)

    @classmethod
    def from_dict(cls, data: dict) -> "VerifierReport":
        checks = [CheckRecord(**c) for c in data["checks"]]
        return cls(data["config"], data["environment"], checks, data["status"], data.get("wall_time", 0.0))

    def write(self, path):
        atomic_write(Path(path), self.to_json())


def overall_status(checks: Sequence[CheckRecord], mode: str) -> str:
    if any(c.status == FAILED for c in checks):
        return FAILED
    if mode == "exact" and all(c.status == PROVED for c in checks if c.mandatory):
        return PROVED
    return CONSISTENT


def environment_fingerprint() -> dict:
    from . import __version__
    return {
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "machine": platform.machine(),
        "kernel_backend": K.BACKEND,
        "package_version": __version__,
    }


# ---------------------------------------------------------------------------
# helpers


def _point_rng(seed: int, name: str, k: int) -> random.Random:
    return random.Random(zlib.crc32(f"{seed}|{name}|{k}".encode()))


def sample_points(rank: int, seed: int, name: str, count: int) -> list[tuple[int, ...]]:
    return [random_point(rank, _point_rng(seed, name, k)) for k in range(count)]


def fraction_digest(f: GeoFraction) -> str:
    """Stable digest of a fraction's stored form (numerator terms and factor multiset)."""
    h = hashlib.sha256()
    h.update(f"{f.rank};{f.scale}|".encode())
    for k in sorted(f.num):
        h.update(f"{k}:{f.num[k]},".encode())
    h.update(b"|")
    for k in sorted(f.den):
        h.update(f"{k}^{f.den[k]},".encode())
    return h.hexdigest()


def fraction_summary(f: GeoFraction) -> dict:
    out = {"terms": len(f.num), "factors": f.degree()}
    if f.num:
        top = max(f.num)
        out["leading_exponent"] = list(K.unpack(top, f.rank))
        out["leading_coefficient"] = f.num[top]
    return out


def bisect_nonzero(values: Sequence[int], p: int = DEFAULT_PRIME) -> tuple[int, int]:
    """Smallest block [lo, hi) found by halving whose sum is nonzero mod p."""
    lo, hi = 0, len(values)
    if sum(values) % p == 0:
        raise ValueError("sum is zero; nothing to localize")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if sum(values[lo:mid]) % p:
            hi = mid
        else:
            lo = mid
    return lo, hi


def delta_at(R: RootSystem, point, p: int = DEFAULT_PRIME) -> int:
    v = eval_at(weyl_denominator(R), point, p)
    if v == 0:
        raise UnluckyPoint("Weyl denominator vanishes at the sample point")
    return v


def eval_character(R: RootSystem, lam: Weight, point, p: int = DEFAULT_PRIME, delta: int | None = None) -> int:
    num = {K.pack(mu.coords): s for mu, s in signed_orbit(R, lam + R.rho).items()}
    d = delta if delta is not None else delta_at(R, point, p)
    return K.eval_mod(num, point, R.rank, p) * pow(d, -1, p) % p


def eval_multiplicities(R: RootSystem, mults, point, p: int = DEFAULT_PRIME) -> int:
    d = delta_at(R, point, p)
    return sum(c * eval_character(R, w, point, p, d) for w, c in mults.items()) % p


def q_side_residue(R: RootSystem, node: int, lam: Weight, table: LambdaTable) -> GeoFraction:
    """C_lam of Q^(a)(t) for dominant lam in Lambda_a."""
    name = str(R.ctype)
    if name == "F4" and node == 2:
        return coeff_C2(R, lam).value
    if name == "F4" and node == 1:
        return coeff_C1(R, lam)
    series = QSystem(R).series(node, table.degree(R))
    val = residue_from_series(series, table, PoleSpec(lam), R).value
    if not isinstance(val, GeoFraction):
        raise TypeError("residue lies in a cyclotomic extension")
    return val


def q_side_term(R: RootSystem, node: int, m: int) -> GroupRingElem:
    """Q^(a)_m; in F4 nodes 1, 2 from the closed node-1 sum and the node-1 relation."""
    name = str(R.ctype)
    if name == "F4" and node == 1:
        return q1_f4(m)
    if name == "F4" and node == 2:
        if m == 0:
            return GroupRingElem.one(4)
        return q1_f4(m) * q1_f4(m) - q1_f4(m - 1) * q1_f4(m + 1)
    return QSystem(R).term(node, m)


def _orbit_coefficients(R: RootSystem, coeffs: dict[Weight, GeoFraction], table: LambdaTable) -> dict[Weight, GeoFraction]:
    W = weyl_group(R)
    full, _ = table.expanded(R)
    out = {}
    for mu in full:
        dom, w = W.dominant_representative(mu)
        out[mu] = coeffs[dom].weyl_act(w)
    return out


def _run(name: str, mandatory: bool, mode: str, fn: Callable[[], tuple[str, dict]]) -> CheckRecord:
    t0 = time.perf_counter()
    try:
        status, wit = fn()
    except Exception as exc:  # every failure is recorded, the pipeline goes on
        status, wit = FAILED, {"error": f"{type(exc).__name__}: {exc}"}
        for attr in ("index", "m"):
            if hasattr(exc, attr):
                wit[attr] = getattr(exc, attr)
    return CheckRecord(name, status, mandatory, mode, time.perf_counter() - t0, wit)


# ---------------------------------------------------------------------------
# individual checks (module level so a process pool can run them)


def _load_spec(cfg: VerifierConfig) -> PolyhedralSpec | None:
    if cfg.spec is not None:
        return PolyhedralSpec.from_dict(cfg.spec)
    if cfg.spec_path:
        return PolyhedralSpec.load(cfg.spec_path)
    try:
        return PolyhedralSpec.packaged(cfg.ctype, cfg.node)
    except UnknownSpec:
        return None


def check_table(R: RootSystem, table: LambdaTable) -> tuple[str, dict]:
    flags = table.check(R)
    W = weyl_group(R)
    wit = dict(flags)
    wit["degree"] = table.degree(R)
    wit["orbit_sizes"] = {str(l): len(W.orbit(l)) for l in table.lambda_a}
    return (PROVED if all(flags.values()) else FAILED), wit


def check_spec_consistency(spec: PolyhedralSpec, orders: int) -> tuple[str, dict]:
    for m in range(orders + 1):
        a = multiplicities_direct(spec, m)
        b = multiplicities_series(spec, m)
        if a != b:
            diff = sorted(set(a) | set(b), key=lambda w: w.coords)
            diff = [w for w in diff if a.get(w, 0) != b.get(w, 0)]
            return FAILED, {
                "first_m": m,
                "differences": [{"weight": list(w.coords), "formula": a.get(w, 0), "factored": b.get(w, 0)}
                                for w in diff[:5]],
                "difference_count": len(diff),
            }
    return PROVED, {"orders": orders}


def check_pole_sets(R: RootSystem, spec: PolyhedralSpec, table: LambdaTable) -> tuple[str, dict]:
    linear = sorted({f.weight.coords for f in spec.factors if f.tdeg == 1})
    higher = sorted({f.weight.coords for f in spec.factors if f.tdeg > 1 or f.power > 1})
    want = sorted({l.coords for l in table.lambda_a})
    ok = linear == want and not table.lambda_a_prime
    return (PROVED if ok else FAILED), {
        "simple_poles": [list(c) for c in linear],
        "lambda": [list(c) for c in want],
        "cancelled_by_vanishing": [list(c) for c in higher],
    }


def vanishing_subgroup(spec: PolyhedralSpec, lam: Weight) -> tuple[int, ...]:
    """Inner parabolic subgroup whose cosets carry the cancellation (empty if none is known)."""
    from .polyform import _DOCUMENTED
    R = spec.root_system
    if str(R.ctype) != "F4":
        return ()
    for (coords, kind), (J, route) in _DOCUMENTED.items():
        if coords == lam.coords and route == "parabolic":
            return tuple(sorted(J))
    return ()


def check_vanishing(spec_dict: dict, coords: tuple, mode: str, seed: int, points: int) -> CheckRecord:
    spec = PolyhedralSpec.from_dict(spec_dict)
    lam = Weight(coords)
    name = f"vanishing:{','.join(map(str, coords))}"

    def localize(count: int) -> dict:
        """Evaluate the stabilizer summands and bisect to the first nonzero block."""
        R = spec.root_system
        W = weyl_group(R)
        try:
            i = factor_index(spec, lam, "quad")
        except KeyError:
            i = factor_index(spec, lam, "double")
        els = W.enumerate_parabolic(W.stabilizer_nodes(lam))
        parts = [e_part(spec, w, i) for w in els]
        # summands cancel within cosets w W_J of the certified subgroup, so bisect over coset sums
        J = set(vanishing_subgroup(spec, lam))
        probe = R.zero()
        for a in R.nodes:
            if a not in J:
                probe = probe + R.fundamental(a)
        cosets: dict[Weight, list[int]] = {}
        for k, w in enumerate(els):
            cosets.setdefault(w.apply(probe), []).append(k)
        blocks = sorted(cosets.values())
        for pt in sample_points(R.rank, seed, name, count):
            for c in range(len(parts[0])):
                try:
                    per = [sum(eval_at(parts[k][c], pt) for k in b) % DEFAULT_PRIME for b in blocks]
                except UnluckyPoint:
                    continue
                if sum(per) % DEFAULT_PRIME:
                    lo, _ = bisect_nonzero(per)
                    return {"point": list(pt), "t_power": c, "inner_subgroup": sorted(J),
                            "localized_coset": repr(els[blocks[lo][0]]), "coset_count": len(blocks),
                            "stabilizer_order": len(els)}
        return {"stabilizer_order": len(els)}

    def exact():
        try:
            cert = check_E_vanishing(spec, lam)
        except VanishingFailure as exc:
            wit = {"error": str(exc)}
            wit.update(localize(5))
            return FAILED, wit
        return PROVED, cert.as_dict()

    def prob():
        wit = localize(points)
        if "localized_coset" in wit:
            return FAILED, wit
        return CONSISTENT, {"points": points, "stabilizer_order": wit["stabilizer_order"]}

    return _run(name, True, mode, exact if mode == "exact" else prob)


def check_residue(spec_dict: dict, node: int, coords: tuple, mode: str, seed: int, points: int,
                  route: str = "stabilizer", chunk: int = 8) -> CheckRecord:
    spec = PolyhedralSpec.from_dict(spec_dict)
    R = spec.root_system
    lam = Weight(coords)
    table = lambda_table(R, node)
    name = f"residue:{','.join(map(str, coords))}"

    def witness_for(C: GeoFraction) -> dict:
        # a sample point where Delta*C and the stabilizer sum differ, with the size of that sum;
        # no proper sub-sum has a known target here, so summand-level localization lives in the vanishing checks
        W = weyl_group(R)
        i = factor_index(spec, lam, "linear")
        els = W.enumerate_parabolic(W.stabilizer_nodes(lam))
        for pt in sample_points(R.rank, seed, name + ":witness", 5):
            try:
                q_val = eval_at(C, pt) * delta_at(R, pt) % DEFAULT_PRIME
                p_val = sum(eval_at(d_part(spec, w, i), pt) for w in els) % DEFAULT_PRIME
            except UnluckyPoint:
                continue
            if q_val != p_val:
                return {"point": list(pt), "q_side_at_point": q_val, "p_side_at_point": p_val,
                        "summand_count": len(els)}
        return {}

    def exact():
        C = q_side_residue(R, node, lam, table)
        if route == "direct" and lam.is_zero():
            DC = d_zero_by_cosets(spec, zero_route_subgroup(R), chunk)
        else:
            DC = d_numerator(spec, lam, chunk=chunk)
        delta = GeoFraction.from_elem(weyl_denominator(R))
        diff = C.mul(delta, normalize=False).add(DC, -1)
        wit = {"route": route, "q_side": fraction_summary(C), "q_digest": fraction_digest(C),
               "stabilizer_order": len(weyl_group(R).enumerate_parabolic(weyl_group(R).stabilizer_nodes(lam)))}
        if diff.is_zero():
            return PROVED, wit
        wit["difference"] = fraction_summary(diff.normalized())
        wit.update(witness_for(C))
        return FAILED, wit

    def prob():
        C = q_side_residue(R, node, lam, table)
        from .polyform import eval_d_numerator
        for pt in sample_points(R.rank, seed, name, points):
            lhs = eval_at(C, pt) * delta_at(R, pt) % DEFAULT_PRIME
            rhs = eval_d_numerator(spec, lam, pt)
            if lhs != rhs:
                wit = {"route": "evaluation", "point": list(pt)}
                wit.update(witness_for(C))
                return FAILED, wit
        return CONSISTENT, {"route": "evaluation", "points": points}

    return _run(name, True, mode, exact if mode == "exact" else prob)


def zero_route_subgroup(R: RootSystem) -> tuple[int, ...]:
    """Inner subgroup for the coset route at lam = 0: W_{1,3,4} in F4, trivial in rank <= 2."""
    if R.rank >= 3:
        return tuple(weyl_group(R).stabilizer_nodes(R.fundamental(2)))
    return ()


def check_closure(spec: PolyhedralSpec, node: int, deps: Sequence[CheckRecord], mode: str,
                  seed: int, points: int) -> tuple[str, dict]:
    """lam = 0 from sum_lam C_lam = Q_0 = 1 = P_0 = sum_lam D_lam and W-equivariance.

    Exact status needs every nonzero residue and every vanishing certificate
    proved; the full Weyl sum for Delta*D_0 is also compared with Delta*C_0
    at sample points as an independent witness.
    """
    R = spec.root_system
    table = lambda_table(R, node)
    zero = R.zero()
    p0 = multiplicities_series(spec, 0)
    q0 = q_side_term(R, node, 0)
    wit = {"route": "closure-identity", "depends_on": [d.name for d in deps],
           "p0_is_one": p0 == {zero: 1}, "q0_is_one": q0 == GroupRingElem.one(R.rank)}
    if not (wit["p0_is_one"] and wit["q0_is_one"]):
        return FAILED, wit
    bad = [d.name for d in deps if d.status == FAILED]
    if bad:
        wit["blocked_by"] = bad
        return FAILED, wit
    C0 = q_side_residue(R, node, zero, table)
    wit["q_side"] = fraction_summary(C0)
    wit["q_digest"] = fraction_digest(C0)
    from .polyform import eval_d_numerator
    checked = []
    for pt in sample_points(R.rank, seed, "closure", points):
        lhs = eval_at(C0, pt) * delta_at(R, pt) % DEFAULT_PRIME
        rhs = eval_d_numerator(spec, zero, pt)
        if lhs != rhs:
            wit["point"] = list(pt)
            wit["difference_at_point"] = (lhs - rhs) % DEFAULT_PRIME
            return FAILED, wit
        checked.append(list(pt))
    wit["evaluation_points"] = len(checked)
    if mode == "exact" and all(d.status == PROVED for d in deps):
        return PROVED, wit
    return CONSISTENT, wit


def check_expansion(spec: PolyhedralSpec, node: int, orders: int, seed: int, points: int) -> tuple[str, dict]:
    """P_m from the multiplicity formula against sum_lam C_lam e^{m lam}, at sample points."""
    R = spec.root_system
    table = lambda_table(R, node)
    coeffs = {l: q_side_residue(R, node, l, table) for l in table.lambda_a}
    full = _orbit_coefficients(R, coeffs, table)
    use_formula = bool(spec.formula)
    for pt in sample_points(R.rank, seed, "expansion", points):
        cvals = {mu: eval_at(c, pt) for mu, c in full.items()}
        for m in range(orders + 1):
            mults = multiplicities_direct(spec, m) if use_formula else multiplicities_series(spec, m)
            lhs = eval_multiplicities(R, mults, pt)
            rhs = sum(v * K.eval_mod({K.pack((mu * m).coords): 1}, pt, R.rank, DEFAULT_PRIME)
                      for mu, v in cvals.items()) % DEFAULT_PRIME
            if lhs != rhs:
                wit = {"first_m": m, "point": list(pt), "p_side": lhs, "q_side": rhs}
                if use_formula:
                    ref = multiplicities_series(spec, m)
                    diff = [w for w in sorted(set(mults) | set(ref), key=lambda w: w.coords)
                            if mults.get(w, 0) != ref.get(w, 0)]
                    wit["localized_weights"] = [{"weight": list(w.coords), "formula": mults.get(w, 0),
                                                 "factored": ref.get(w, 0)} for w in diff[:5]]
                return FAILED, wit
    return CONSISTENT, {"orders": orders, "points": points, "source": "formula" if use_formula else "factored"}


def check_terms(spec: PolyhedralSpec | None, R: RootSystem, node: int, m_max: int, mode: str,
                seed: int, points: int) -> tuple[str, dict]:
    for m in range(m_max + 1):
        Q = q_side_term(R, node, m)
        if spec is None:
            raise ValueError("no polyhedral side")
        if mode == "exact":
            P = p_m_direct(spec, m) if spec.formula else p_m_series(spec, m)
            if Q != P:
                raise TermMismatch(m)
        else:
            mults = multiplicities_direct(spec, m) if spec.formula else multiplicities_series(spec, m)
            for pt in sample_points(R.rank, seed, f"terms:{m}", points):
                if eval_at(Q, pt) != eval_multiplicities(R, mults, pt):
                    raise TermMismatch(m)
    return (PROVED if mode == "exact" else CONSISTENT), {"max_m": m_max}


def check_recurrence(R: RootSystem, node: int, table: LambdaTable, extra: int) -> tuple[str, dict]:
    deg = table.degree(R)
    if str(R.ctype) == "F4" and node == 1:
        rep = check_linear_recurrence_characters([q1_f4_characters(m) for m in range(deg + extra + 1)],
                                                 table, extra, R)
        return PROVED, {"degree": rep.degree, "vanishing_indices": rep.checked, "basis": "characters"}
    series = QSystem(R).series(node, deg + extra)
    rep = check_linear_recurrence(series, table, extra, R)
    numer = [n.dumps() for n in rep.numerator]
    while numer and GroupRingElem.loads(numer[-1]).is_zero():
        numer.pop()
    return PROVED, {"degree": rep.degree, "vanishing_indices": rep.checked, "numerator_degree": len(numer) - 1}


def check_reconstruction(R: RootSystem, node: int, table: LambdaTable, orders: int) -> tuple[str, dict]:
    """Q_m = sum_lam C_lam e^{m lam} exactly, for m <= orders."""
    coeffs = {l: q_side_residue(R, node, l, table) for l in table.lambda_a}
    full = _orbit_coefficients(R, coeffs, table)
    for m in range(orders + 1):
        got = reconstruct_term(full, m, R.rank).to_elem()
        if got != q_side_term(R, node, m):
            raise TermMismatch(m, f"residue reconstruction differs at m = {m}")
    return PROVED, {"orders": orders}


def check_qsystem_closed_form(R: RootSystem, node: int, m_max: int) -> tuple[str, dict]:
    """The full coupled Q-system, solved in the character basis, against the closed node-1 sum."""
    qs = CharacterQSystem(R)
    for m in range(m_max + 1):
        if qs.term(node, m) != q1_f4_characters(m):
            raise TermMismatch(m)
    sizes = {f"{a},{k}": len(v) for (a, k), v in sorted(qs.computed_terms().items())}
    return PROVED, {"max_m": m_max, "basis": "characters", "constituent_counts": sizes}


# ---------------------------------------------------------------------------
# pipeline


def _pool_map(fn, args_list, workers: int):
    if workers <= 1 or len(args_list) <= 1:
        return [fn(*a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(fn, *a) for a in args_list]
        return [f.result() for f in futs]


def _lambda0_route(cfg: VerifierConfig, R: RootSystem) -> str:
    if cfg.lambda0_route != "auto":
        return cfg.lambda0_route
    return "direct" if weyl_group(R).order <= 48 else "closure"


def run_pipeline(cfg: VerifierConfig, log: Callable[[str], None] | None = None) -> VerifierReport:
    """Run every check for (type, node); failures are recorded, never raised."""
    cfg.validate()
    cache_dir = cfg.cache_dir or os.environ.get(CACHE_ENV)
    if not cache_dir:
        return _pipeline(cfg, log)
    use_store(DiskCharacterStore(cache_dir))
    try:
        return _pipeline(cfg, log)
    finally:
        use_store(None)


def _pipeline(cfg: VerifierConfig, log: Callable[[str], None] | None) -> VerifierReport:
    t_start = time.perf_counter()
    say = log or (lambda s: None)
    R = build_root_system(cfg.ctype)
    mode = cfg.mode
    records: list[CheckRecord] = []

    def add(rec: CheckRecord):
        records.append(rec)
        say(f"{rec.name:28s} {rec.status:10s} {rec.wall_time:8.2f}s")

    table = lambda_table(R, cfg.node)
    add(_run("table-sanity", True, mode, lambda: check_table(R, table)))
    spec = _load_spec(cfg)

    if spec is None:
        if str(R.ctype) == "F4" and cfg.node == 1:
            m_qs = cfg.max_term_check
            add(_run("qsystem-closed-form", True, mode, lambda: check_qsystem_closed_form(R, 1, m_qs)))
            add(_run("recurrence", True, mode, lambda: check_recurrence(R, 1, table, cfg.recurrence_extra)))
            add(_run("residue-reconstruction", True, mode,
                     lambda: check_reconstruction(R, 1, table, cfg.reconstruct_orders)))
        else:
            add(_run("recurrence", True, mode, lambda: check_recurrence(R, cfg.node, table, cfg.recurrence_extra)))
        return _finish(cfg, records, t_start)

    spec.validate()
    spec_dict = spec.to_dict()
    if spec.formula:
        add(_run("spec-consistency", True, mode, lambda: check_spec_consistency(spec, cfg.consistency_orders)))
    add(_run("pole-sets", True, mode, lambda: check_pole_sets(R, spec, table)))

    special = sorted({f.weight.coords for f in spec.factors if f.tdeg > 1 or f.power > 1})
    vanishing = _pool_map(check_vanishing, [(spec_dict, c, mode, cfg.seed, cfg.prob_points) for c in special],
                          cfg.workers)
    for rec in vanishing:
        add(rec)

    route0 = _lambda0_route(cfg, R)
    residue_weights = [l for l in table.lambda_a if not (l.is_zero() and route0 == "closure")]
    residue_weights.sort(key=lambda w: w.coords, reverse=True)
    residues = _pool_map(check_residue, [(spec_dict, cfg.node, l.coords, mode, cfg.seed, cfg.prob_points,
                                          "direct" if l.is_zero() else "stabilizer", cfg.chunk_size)
                                         for l in residue_weights], cfg.workers)
    for rec in residues:
        add(rec)
    if route0 == "closure" and any(l.is_zero() for l in table.lambda_a):
        deps = vanishing + residues
        add(_run("residue:" + ",".join("0" * R.rank), True, mode,
                 lambda: check_closure(spec, cfg.node, deps, mode, cfg.seed, cfg.prob_points)))

    add(_run("residue-expansion", False, mode,
             lambda: check_expansion(spec, cfg.node, cfg.expansion_orders, cfg.seed, cfg.prob_points)))
    if table.degree(R) <= 16:
        add(_run("recurrence", False, mode, lambda: check_recurrence(R, cfg.node, table, cfg.recurrence_extra)))
    if cfg.max_term_check > 0:
        add(_run("term-check", False, mode,
                 lambda: check_terms(spec, R, cfg.node, cfg.max_term_check, mode, cfg.seed, cfg.prob_points)))
    return _finish(cfg, records, t_start)


def _finish(cfg: VerifierConfig, records: list[CheckRecord], t_start: float) -> VerifierReport:
    if cfg.mode == "prob":
        for r in records:
            if r.status == PROVED:
                r.status = CONSISTENT
    cfg_echo = dataclasses.asdict(cfg)
    rep = VerifierReport(cfg_echo, environment_fingerprint(), records, overall_status(records, cfg.mode),
                         time.perf_counter() - t_start)
    if cfg.report_path:
        atomic_write(Path(cfg.report_path), rep.to_json())
    return rep


def negative_control_spec(kind: str = "drop-square", base: PolyhedralSpec | None = None) -> PolyhedralSpec:
    """Deliberately wrong variants of the F4 node-2 formula."""
    spec = base or PolyhedralSpec.load()
    if kind == "drop-square":
        idx = next(i for i, f in enumerate(spec.factors) if f.power == 2)
        return spec.with_power(idx, 1)
    if kind == "drop-j4-factor":
        return spec.with_formula(spec.formula.replace(" * (j4 + 1)", ""))
    if kind == "shift-min":
        return spec.with_formula(spec.formula.replace("min(1 + j3", "min(2 + j3"))
    raise ValueError(f"unknown negative control {kind}")
