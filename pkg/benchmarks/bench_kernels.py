"""Compiled vs pure-Python kernels on workloads taken from the F4 pipeline.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import time

from krpoly import _pykernels as py
from krpoly.charformula import character, weyl_numerator
from krpoly.qsystem import denominator_polynomial, lambda_table
from krpoly.rootsys import Weight, build_root_system
from krpoly.weylgrp import weyl_group

try:
    from krpoly import _ckernels as cy
except ImportError:
    cy = None


def workloads():
    R = build_root_system("F4")
    W = weyl_group(R)
    chi_w1 = character(R, Weight((1, 0, 0, 0))).value.terms
    chi_w4 = character(R, Weight((0, 0, 0, 1))).value.terms
    chi_big = character(R, Weight((2, 1, 0, 0))).value.terms
    num = weyl_numerator(R, Weight((1, 1, 0, 0))).terms
    prod = py.mul(chi_w1, chi_w4)
    w = W.elements()[700]
    point = (123456789, 987654321, 555555555, 42424242)
    prime = (1 << 61) - 1
    d12 = denominator_polynomial(R, lambda_table(R, 1))[12].terms
    roots = [R.simple_root(a).coords for a in R.nodes]
    base = (Weight((7, 0, 0, 0)) + R.rho).coords
    pos = [py.pack((-a).coords) for a in R.positive_roots]
    pos = [m if m > 0 else -m for m in pos]
    return {
        "mul chi(2w1+w2)*chi(w1)": lambda K: K.mul(chi_big, chi_w1),
        "div_binomial x24 (Weyl quotient)": lambda K: _divide_all(K, num, pos),
        "exact_quotient": lambda K: K.exact_quotient(prod, chi_w4, 4),
        "act (Weyl substitution)": lambda K: K.act(chi_big, w.matrix, 4),
        "eval_mod": lambda K: K.eval_mod(chi_big, point, 4, prime),
        "dominant_fold D_12 * chi(7w1)": lambda K: K.dominant_fold(d12, base, roots, 4),
    }


def _divide_all(K, terms, ms):
    for m in ms:
        terms = K.div_binomial(terms, m)
    return terms


def bench(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    rows = []
    for name, fn in workloads().items():
        t_py = bench(lambda: fn(py), args.repeat)
        t_cy = bench(lambda: fn(cy), args.repeat) if cy is not None else None
        if cy is not None and fn(py) != fn(cy):
            raise SystemExit(f"backends disagree on {name}")
        rows.append({"kernel": name, "python_s": t_py, "compiled_s": t_cy,
                     "speedup": (t_py / t_cy) if t_cy else None})
    print(f"{'kernel':36s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for r in rows:
        c = f"{r['compiled_s']:10.4f}" if r["compiled_s"] is not None else f"{'n/a':>10s}"
        s = f"{r['speedup']:8.1f}" if r["speedup"] else f"{'':>8s}"
        print(f"{r['kernel']:36s} {r['python_s']:10.4f} {c} {s}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
