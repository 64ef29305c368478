"""Pure-Python sparse Laurent kernels.

Exponent vectors are packed into one integer with balanced base-2**16
digits, first coordinate most significant, so that packing is additive and
integer order equals lexicographic order on coordinates.  Every kernel
takes and returns plain ``dict[int, int]`` with no zero coefficients.
"""
from __future__ import annotations

BITS = 16
BASE = 1 << BITS
HALF = BASE >> 1
MASK = BASE - 1
BACKEND = "python"


def pack(v) -> int:
    k = 0
    for c in v:
        if not -HALF < c < HALF:
            raise OverflowError(f"exponent {c} out of packing range")
        k = k * BASE + c
    return k


def unpack(k: int, rank: int) -> tuple[int, ...]:
    out = [0] * rank
    for j in range(rank - 1, -1, -1):
        d = ((k + HALF) & MASK) - HALF
        out[j] = d
        k = (k - d) >> BITS
    return tuple(out)


def add(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + v
        if s:
            out[k] = s
        else:
            del out[k]
    return out


def add_scaled(a: dict, b: dict, c: int, shift: int = 0) -> dict:
    """a + c * x**shift * b."""
    out = dict(a)
    get = out.get
    for k, v in b.items():
        k += shift
        s = get(k, 0) + c * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def mul(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for kb, vb in b.items():
        for ka, va in a.items():
            k = ka + kb
            out[k] = get(k, 0) + va * vb
    return {k: v for k, v in out.items() if v}


def shift(a: dict, s: int, c: int = 1) -> dict:
    return {k + s: c * v for k, v in a.items()}


def mul_binomial(a: dict, m: int) -> dict:
    """a * (1 - x**m)."""
    out = dict(a)
    get = out.get
    for k, v in a.items():
        k += m
        s = get(k, 0) - v
        if s:
            out[k] = s
        else:
            del out[k]
    return out


def _top_digit(m: int):
    """(position, value) of the most significant balanced digit of m > 0."""
    j, d = -1, 0
    while m:
        d = ((m + HALF) & MASK) - HALF
        m = (m - d) >> BITS
        j += 1
    return j, d


def line_classes(keys, m: int) -> dict:
    """Map each key to the representative of its line {k + j*m}."""
    j0, top = _top_digit(m)
    off = 0
    for j in range(j0 + 1):
        off += HALF << (BITS * j)
    sh = BITS * j0
    out = {}
    for k in keys:
        d = (((k + off) >> sh) & MASK) - HALF
        out[k] = k - (d // top) * m
    return out


def div_binomial(a: dict, m: int):
    """a / (1 - x**m) if exact, else None.  Requires m > 0."""
    if m <= 0:
        raise ValueError("div_binomial needs a positive packed exponent")
    if not a:
        return {}
    cls = line_classes(a, m)
    sums: dict = {}
    for k, v in a.items():
        c = cls[k]
        sums[c] = sums.get(c, 0) + v
    for v in sums.values():
        if v:
            return None
    lines: dict = {}
    for k in sorted(a):
        lines.setdefault(cls[k], []).append(k)
    q = {}
    for ks in lines.values():
        run = 0
        prev = None
        for k in ks:
            if run:
                p = prev + m
                while p < k:
                    q[p] = run
                    p += m
            run += a[k]
            if run:
                q[k] = run
            prev = k
    return q


def act(a: dict, matrix, rank: int) -> dict:
    """Substitute exponents v -> matrix . v."""
    out = {}
    rows = [tuple(r) for r in matrix]
    for k, v in a.items():
        e = unpack(k, rank)
        kk = 0
        for r in rows:
            c = 0
            for x, y in zip(r, e):
                c += x * y
            kk = kk * BASE + c
        out[kk] = v
    return out


def eval_mod(a: dict, point, rank: int, p: int) -> int:
    """Evaluate at x_j -> point[j] modulo p."""
    caches = [dict() for _ in range(rank)]
    total = 0
    for k, v in a.items():
        e = unpack(k, rank)
        t = v % p
        for j in range(rank):
            ej = e[j]
            if ej:
                cj = caches[j]
                pw = cj.get(ej)
                if pw is None:
                    pw = pow(point[j], ej, p)
                    cj[ej] = pw
                t = t * pw % p
        total += t
    return total % p


def mul_binomials(a: dict, ms) -> dict:
    """a * prod_m (1 - x**m)."""
    for m in ms:
        a = mul_binomial(a, m)
    return a


def _box(a: dict, rank: int):
    pts = [unpack(k, rank) for k in a]
    return [min(p[c] for p in pts) for c in range(rank)], [max(p[c] for p in pts) for c in range(rank)]


def exact_quotient(a: dict, b: dict, rank: int):
    """q with a = b*q by elimination of the largest key, or None if inexact.

    Every quotient exponent must lie in the box [min a - min b, max a - max b]
    coordinatewise (Newton polytopes add), which stops hopeless eliminations early.
    """
    import heapq

    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if not a:
        return {}
    alo, ahi = _box(a, rank)
    blo, bhi = _box(b, rank)
    qlo = [x - y for x, y in zip(alo, blo)]
    qhi = [x - y for x, y in zip(ahi, bhi)]
    if any(x > y for x, y in zip(qlo, qhi)):
        return None
    btop = max(b)
    ctop = b[btop]
    rest = [(k, v) for k, v in b.items() if k != btop]
    rem = dict(a)
    heap = [-k for k in rem]
    heapq.heapify(heap)
    quot = {}
    while heap:
        k = -heapq.heappop(heap)
        v = rem.pop(k, 0)
        if not v:
            continue
        q, r = divmod(v, ctop)
        if r:
            return None
        base = k - btop
        e = unpack(base, rank)
        if any(x < lo or x > hi for x, lo, hi in zip(e, qlo, qhi)):
            return None
        quot[base] = q
        for kk, vv in rest:
            t = base + kk
            old = rem.get(t)
            if old is None:
                rem[t] = -q * vv
                heapq.heappush(heap, -t)
            else:
                rem[t] = old - q * vv
    return quot


def dominant_fold(a: dict, base, simple_roots, rank: int) -> dict:
    """Signed dominant reduction of sum_k a[k] e^{k + base}.

    Each exponent v = k + base is reflected into the dominant chamber; it
    contributes sign(w) * a[k] at w(v) - rho if w(v) is regular, nothing if it
    lies on a wall.  ``base`` is (lambda + rho) in omega-coordinates and
    ``simple_roots[j]`` the omega-coordinates of alpha_j.  Output keys are
    packed w(v) - rho.
    """
    out: dict = {}
    for k, c in a.items():
        v = list(unpack(k, rank))
        for j in range(rank):
            v[j] += base[j]
        sign = 1
        wall = False
        while True:
            j = next((i for i in range(rank) if v[i] <= 0), -1)
            if j < 0:
                break
            vj = v[j]
            if vj == 0:
                wall = True
                break
            al = simple_roots[j]
            for i in range(rank):
                v[i] -= vj * al[i]
            sign = -sign
        if wall:
            continue
        key = pack([x - 1 for x in v])
        s = out.get(key, 0) + sign * c
        if s:
            out[key] = s
        else:
            del out[key]
    return out
