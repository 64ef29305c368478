"""Command line: verify, char, qtable, orbits."""
from __future__ import annotations

import argparse
import json
import sys

from .cache import DiskCharacterStore
from .charformula import character, decompose, dimension
from .rootsys import UnsupportedType, Weight, build_root_system
from .verifier import CONSISTENT, PROVED, VerifierConfig, run_pipeline
from .weylgrp import weyl_group

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def _weight(text: str) -> Weight:
    try:
        return Weight(tuple(int(x) for x in text.split(",")))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad weight {text!r}; expected comma-separated integers") from exc


def _cmd_verify(args) -> int:
    cfg = VerifierConfig(
        ctype=args.type, node=args.node, mode=args.mode, max_term_check=args.term_check,
        chunk_size=args.chunk_size, workers=args.workers, cache_dir=args.cache_dir,
        report_path=args.report, lambda0_route=args.lambda0_route, seed=args.seed,
        spec_path=args.spec,
    )
    log = None if args.quiet else (lambda s: print(s, flush=True))
    rep = run_pipeline(cfg, log=log)
    print(f"overall: {rep.status} ({rep.wall_time:.1f}s)")
    for c in rep.failed():
        print(f"  FAILED {c.name}: {json.dumps(c.witnesses, default=str)[:500]}")
    ok = rep.status == PROVED if args.mode == "exact" else rep.status == CONSISTENT
    return EXIT_OK if ok else EXIT_FAILED


def _cmd_char(args) -> int:
    R = build_root_system(args.type)
    store = DiskCharacterStore(args.cache_dir) if args.cache_dir else None
    lam = args.weight
    if len(lam.coords) != R.rank or not lam.is_dominant():
        print(f"error: {lam} is not a dominant weight of {args.type}", file=sys.stderr)
        return EXIT_USAGE
    chi = character(R, lam, store).value
    dom = sorted(((w, c) for w, c in chi.items() if w.is_dominant()), key=lambda x: x[0].coords, reverse=True)
    print(f"L({','.join(map(str, lam.coords))}) in {args.type}: dimension {dimension(R, lam)}, "
          f"{len(chi)} distinct weights")
    for w, c in dom:
        print(f"  {','.join(map(str, w.coords)):>16s}  {c}")
    return EXIT_OK


def _cmd_qtable(args) -> int:
    from .verifier import q_side_term
    R = build_root_system(args.type)
    for m in range(args.max_m + 1):
        q = q_side_term(R, args.node, m)
        parts = decompose(R, q)
        text = " + ".join(f"{c if c != 1 else ''}L({','.join(map(str, w.coords))})"
                          for w, c in sorted(parts.items(), key=lambda x: x[0].coords, reverse=True))
        print(f"Q^({args.node})_{m} = {text}")
    return EXIT_OK


def _cmd_orbits(args) -> int:
    R = build_root_system(args.type)
    W = weyl_group(R)
    lam = args.weight
    orb = W.orbit(lam)
    stab = sorted(W.stabilizer_nodes(lam)) if lam.is_dominant() else None
    print(f"|W| = {W.order}, |O({','.join(map(str, lam.coords))})| = {len(orb)}"
          + (f", stabilizer nodes {stab}" if stab is not None else ""))
    if args.list:
        for mu in orb:
            print("  " + ",".join(map(str, mu.coords)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="krpoly", description="Residue verification of polyhedral formulas")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification pipeline")
    v.add_argument("--type", default="F4")
    v.add_argument("--node", type=int, default=2)
    v.add_argument("--mode", choices=["exact", "prob"], default="exact")
    v.add_argument("--chunk-size", type=int, default=8)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--term-check", type=int, default=3)
    v.add_argument("--report")
    v.add_argument("--cache-dir", default=None)
    v.add_argument("--lambda0-route", choices=["auto", "closure", "direct"], default="auto")
    v.add_argument("--spec", help="polyhedral formula JSON (defaults to the packaged one)")
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--quiet", action="store_true")
    v.set_defaults(func=_cmd_verify)

    c = sub.add_parser("char", help="dominant weight multiplicities of an irreducible character")
    c.add_argument("--type", default="F4")
    c.add_argument("--weight", type=_weight, required=True)
    c.add_argument("--cache-dir", default=None)
    c.set_defaults(func=_cmd_char)

    q = sub.add_parser("qtable", help="Q^(a)_m decomposed into irreducibles")
    q.add_argument("--type", default="F4")
    q.add_argument("--node", type=int, default=1)
    q.add_argument("--max-m", type=int, default=4)
    q.set_defaults(func=_cmd_qtable)

    o = sub.add_parser("orbits", help="Weyl group orbit of a weight")
    o.add_argument("--type", default="F4")
    o.add_argument("--weight", type=_weight, required=True)
    o.add_argument("--list", action="store_true")
    o.set_defaults(func=_cmd_orbits)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UnsupportedType, ValueError, LookupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
