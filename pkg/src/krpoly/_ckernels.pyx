# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sparse Laurent kernels over int64 packed exponents.

Same contract as ``_pykernels``.  Coefficients are held in int64 with
checked arithmetic; any overflow raises ``OverflowError`` and the caller in
``kernels`` retries with the pure-Python implementation.
"""
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from libcpp.pair cimport pair
from libcpp.algorithm cimport sort
from libcpp.queue cimport priority_queue
from libc.stdint cimport int64_t, uint64_t
from cython.operator cimport dereference as deref

cdef extern from *:
    """
    static inline int kr_add_ov(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    static inline int kr_mul_ov(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline unsigned long long kr_mulmod(unsigned long long a, unsigned long long b,
                                               unsigned long long p) {
        return (unsigned long long)(((unsigned __int128)a * b) % p);
    }
    """
    int kr_add_ov(long long a, long long b, long long *r) nogil
    int kr_mul_ov(long long a, long long b, long long *r) nogil
    unsigned long long kr_mulmod(unsigned long long a, unsigned long long b, unsigned long long p) nogil

ctypedef long long i64
ctypedef unordered_map[i64, i64] cmap
ctypedef pair[i64, i64] kv

DEF BITS = 16
DEF BASE = 65536
DEF HALF = 32768
DEF MASK = 65535

BACKEND = "cython"


cdef inline void _raise_overflow() except *:
    raise OverflowError("int64 overflow in compiled kernel")


cdef void _load(dict a, cmap& out) except *:
    out.reserve(len(a))
    for k, v in a.items():
        out[<i64>k] = <i64>v


cdef dict _dump(cmap& m):
    cdef dict out = {}
    for it in m:
        if it.second != 0:
            out[it.first] = it.second
    return out


cdef inline void _acc(cmap& m, i64 k, i64 v) except *:
    cdef i64 r
    cdef i64* slot = &m[k]
    if kr_add_ov(slot[0], v, &r):
        _raise_overflow()
    slot[0] = r


def add(dict a, dict b):
    cdef cmap m
    _load(a, m)
    for k, v in b.items():
        _acc(m, <i64>k, <i64>v)
    return _dump(m)


def add_scaled(dict a, dict b, c, shift=0):
    cdef cmap m
    cdef i64 cc = c, sh = shift, kk, vv, t
    _load(a, m)
    for k, v in b.items():
        if kr_add_ov(<i64>k, sh, &kk) or kr_mul_ov(<i64>v, cc, &vv):
            _raise_overflow()
        _acc(m, kk, vv)
    return _dump(m)


def mul(dict a, dict b):
    if len(a) < len(b):
        a, b = b, a
    cdef vector[kv] va, vb
    for k, v in a.items():
        va.push_back(kv(<i64>k, <i64>v))
    for k, v in b.items():
        vb.push_back(kv(<i64>k, <i64>v))
    cdef cmap m
    m.reserve(va.size() * 2)
    cdef size_t i, j
    cdef i64 kk, vv
    for j in range(vb.size()):
        for i in range(va.size()):
            if kr_add_ov(va[i].first, vb[j].first, &kk) or kr_mul_ov(va[i].second, vb[j].second, &vv):
                _raise_overflow()
            _acc(m, kk, vv)
    return _dump(m)


def shift(dict a, s, c=1):
    cdef i64 ss = s, cc = c, kk, vv
    cdef dict out = {}
    for k, v in a.items():
        if kr_add_ov(<i64>k, ss, &kk) or kr_mul_ov(<i64>v, cc, &vv):
            _raise_overflow()
        out[kk] = vv
    return out


cdef void _mul_binomial_inplace(vector[kv]& src, i64 mm, cmap& m) except *:
    cdef size_t i
    cdef i64 kk
    m.clear()
    m.reserve(src.size() * 2)
    for i in range(src.size()):
        _acc(m, src[i].first, src[i].second)
    for i in range(src.size()):
        if kr_add_ov(src[i].first, mm, &kk):
            _raise_overflow()
        _acc(m, kk, -src[i].second)


def mul_binomial(dict a, m):
    return mul_binomials(a, (m,))


def mul_binomials(dict a, ms):
    """a * prod_m (1 - x**m)."""
    cdef vector[kv] cur
    cdef cmap acc
    for k, v in a.items():
        cur.push_back(kv(<i64>k, <i64>v))
    for m in ms:
        _mul_binomial_inplace(cur, <i64>m, acc)
        cur.clear()
        for it in acc:
            if it.second != 0:
                cur.push_back(kv(it.first, it.second))
    cdef dict out = {}
    cdef size_t i
    for i in range(cur.size()):
        out[cur[i].first] = cur[i].second
    return out


cdef inline i64 _floordiv(i64 a, i64 b):
    cdef i64 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef struct Entry:
    i64 cls
    i64 key
    i64 val


cdef bint _entry_less(const Entry& x, const Entry& y) noexcept nogil:
    if x.cls != y.cls:
        return x.cls < y.cls
    return x.key < y.key


def div_binomial(dict a, m):
    """a / (1 - x**m) if exact, else None.  Requires m > 0."""
    if m <= 0:
        raise ValueError("div_binomial needs a positive packed exponent")
    if not a:
        return {}
    cdef i64 mm = m
    # most significant balanced digit of m
    cdef i64 t = mm, d = 0
    cdef int j0 = -1, j
    while t != 0:
        d = ((t + HALF) & MASK) - HALF
        t = (t - d) >> BITS
        j0 += 1
    cdef i64 top = d
    cdef uint64_t off = 0
    for j in range(j0 + 1):
        off += (<uint64_t>HALF) << (BITS * j)
    cdef int sh = BITS * j0
    cdef vector[Entry] ent
    ent.reserve(len(a))
    cdef Entry e
    cdef i64 dig, q, rep
    for k, v in a.items():
        e.key = <i64>k
        e.val = <i64>v
        dig = <i64>((((<uint64_t>e.key) + off) >> sh) & MASK) - HALF
        q = _floordiv(dig, top)
        if kr_mul_ov(q, mm, &rep):
            _raise_overflow()
        e.cls = e.key - rep
        ent.push_back(e)
    sort(ent.begin(), ent.end(), _entry_less)
    cdef size_t i, n = ent.size()
    cdef i64 run = 0, cur_cls
    # line sums
    i = 0
    while i < n:
        cur_cls = ent[i].cls
        run = 0
        while i < n and ent[i].cls == cur_cls:
            if kr_add_ov(run, ent[i].val, &run):
                _raise_overflow()
            i += 1
        if run != 0:
            return None
    cdef dict out = {}
    cdef i64 p, prev = 0
    cdef bint first
    i = 0
    while i < n:
        cur_cls = ent[i].cls
        run = 0
        first = True
        while i < n and ent[i].cls == cur_cls:
            if not first and run != 0:
                p = prev + mm
                while p < ent[i].key:
                    out[p] = run
                    p += mm
            run += ent[i].val
            if run != 0:
                out[ent[i].key] = run
            prev = ent[i].key
            first = False
            i += 1
    return out


def act(dict a, matrix, int rank):
    """Substitute exponents v -> matrix . v."""
    cdef i64 mat[8][8]
    cdef i64 e[8]
    cdef int r, c
    if rank > 8:
        raise OverflowError("rank too large for compiled kernel")
    for r in range(rank):
        for c in range(rank):
            mat[r][c] = matrix[r][c]
    cdef dict out = {}
    cdef i64 k, d, kk, s
    for key, v in a.items():
        k = key
        for c in range(rank - 1, -1, -1):
            d = ((k + HALF) & MASK) - HALF
            e[c] = d
            k = (k - d) >> BITS
        kk = 0
        for r in range(rank):
            s = 0
            for c in range(rank):
                s += mat[r][c] * e[c]
            if s <= -HALF or s >= HALF:
                _raise_overflow()
            kk = kk * BASE + s
        out[kk] = v
    return out


cdef uint64_t _powmod(uint64_t b, i64 ex, uint64_t p):
    cdef uint64_t r = 1
    while ex > 0:
        if ex & 1:
            r = kr_mulmod(r, b, p)
        b = kr_mulmod(b, b, p)
        ex >>= 1
    return r


def eval_mod(dict a, point, int rank, p):
    """Evaluate at x_j -> point[j] modulo p (p < 2**63)."""
    cdef uint64_t pp = p
    cdef uint64_t fwd[8]
    cdef uint64_t inv[8]
    cdef unordered_map[i64, uint64_t] cache[8]
    cdef int j
    if rank > 8:
        raise OverflowError("rank too large for compiled kernel")
    for j in range(rank):
        fwd[j] = point[j] % p
        inv[j] = pow(int(point[j]), -1, p)
    cdef i64 k, d, e
    cdef uint64_t t, total = 0, pw
    cdef unordered_map[i64, uint64_t].iterator it
    cdef i64 coords[8]
    for key, v in a.items():
        t = v % p
        k = key
        for j in range(rank - 1, -1, -1):
            d = ((k + HALF) & MASK) - HALF
            coords[j] = d
            k = (k - d) >> BITS
        for j in range(rank):
            e = coords[j]
            if e == 0:
                continue
            it = cache[j].find(e)
            if it == cache[j].end():
                pw = _powmod(fwd[j], e, pp) if e > 0 else _powmod(inv[j], -e, pp)
                cache[j][e] = pw
            else:
                pw = deref(it).second
            t = kr_mulmod(t, pw, pp)
        total = (total + t) % pp
    return int(total)


cdef inline void _unpack_c(i64 k, int rank, i64* out) noexcept:
    cdef int c
    cdef i64 d
    for c in range(rank - 1, -1, -1):
        d = ((k + HALF) & MASK) - HALF
        out[c] = d
        k = (k - d) >> BITS


cdef void _box(dict a, int rank, i64* lo, i64* hi) except *:
    cdef i64 e[8]
    cdef int c
    cdef bint first = True
    for key in a:
        _unpack_c(<i64>key, rank, e)
        for c in range(rank):
            if first or e[c] < lo[c]:
                lo[c] = e[c]
            if first or e[c] > hi[c]:
                hi[c] = e[c]
        first = False


def exact_quotient(dict a, dict b, int rank):
    """q with a = b*q by elimination of the largest key, or None if inexact.

    Every quotient exponent must lie in the box [min a - min b, max a - max b]
    coordinatewise (Newton polytopes add), which stops hopeless eliminations early.
    """
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if not a:
        return {}
    if rank > 8:
        raise OverflowError("rank too large for compiled kernel")
    cdef i64 alo[8]
    cdef i64 ahi[8]
    cdef i64 blo[8]
    cdef i64 bhi[8]
    cdef i64 qlo[8]
    cdef i64 qhi[8]
    cdef i64 e[8]
    cdef int c
    _box(a, rank, alo, ahi)
    _box(b, rank, blo, bhi)
    for c in range(rank):
        qlo[c] = alo[c] - blo[c]
        qhi[c] = ahi[c] - bhi[c]
        if qlo[c] > qhi[c]:
            return None
    cdef vector[kv] vb
    for key, val in b.items():
        vb.push_back(kv(<i64>key, <i64>val))
    sort(vb.begin(), vb.end())
    cdef size_t nb = vb.size()
    cdef i64 btop = vb[nb - 1].first, ctop = vb[nb - 1].second
    cdef cmap rem
    _load(a, rem)
    cdef priority_queue[i64] heap
    for it in rem:
        heap.push(it.first)
    cdef dict quot = {}
    cdef i64 k, v, q, base, t, prod, s
    cdef size_t j
    cdef cmap.iterator f
    while not heap.empty():
        k = heap.top()
        heap.pop()
        f = rem.find(k)
        if f == rem.end():
            continue
        v = deref(f).second
        rem.erase(f)
        if v == 0:
            continue
        if v % ctop != 0:
            return None
        q = v // ctop
        base = k - btop
        _unpack_c(base, rank, e)
        for c in range(rank):
            if e[c] < qlo[c] or e[c] > qhi[c]:
                return None
        quot[base] = q
        for j in range(nb - 1):
            t = base + vb[j].first
            if kr_mul_ov(q, vb[j].second, &prod):
                _raise_overflow()
            f = rem.find(t)
            if f == rem.end():
                rem[t] = -prod
                heap.push(t)
            else:
                if kr_add_ov(deref(f).second, -prod, &s):
                    _raise_overflow()
                deref(f).second = s
    return quot


def dominant_fold(dict a, base, simple_roots, int rank):
    """Signed dominant reduction of sum_k a[k] e^{k + base} (see _pykernels)."""
    cdef i64 al[8][8]
    cdef i64 b[8]
    cdef i64 v[8]
    cdef int i, j
    cdef i64 k, d, vj, kk, c, r
    cdef int sign
    cdef bint wall
    cdef cmap acc
    if rank > 8:
        raise OverflowError("rank too large for compiled kernel")
    for j in range(rank):
        b[j] = base[j]
        for i in range(rank):
            al[j][i] = simple_roots[j][i]
    for key, val in a.items():
        k = key
        c = val
        for i in range(rank - 1, -1, -1):
            d = ((k + HALF) & MASK) - HALF
            v[i] = d + b[i]
            k = (k - d) >> BITS
        sign = 1
        wall = False
        while True:
            j = -1
            for i in range(rank):
                if v[i] <= 0:
                    j = i
                    break
            if j < 0:
                break
            vj = v[j]
            if vj == 0:
                wall = True
                break
            for i in range(rank):
                v[i] -= vj * al[j][i]
            sign = -sign
        if wall:
            continue
        kk = 0
        for i in range(rank):
            d = v[i] - 1
            if d <= -HALF or d >= HALF:
                _raise_overflow()
            kk = kk * BASE + d
        _acc(acc, kk, c if sign > 0 else -c)
    return _dump(acc)
