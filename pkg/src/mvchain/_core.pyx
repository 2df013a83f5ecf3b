# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled arithmetic kernels (hot loops of the pure backend, typed).

Same interface and bit-for-bit results as ``mvchain._corepy``; moduli up
to 2**64 - 1 are supported via 128-bit intermediates.
"""

from libc.stdlib cimport free, malloc

BACKEND = "c"

ctypedef unsigned long long u64

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"
    ctypedef long long i128 "__int128"


cdef u64* _tobuf(list xs, Py_ssize_t n) except NULL:
    cdef u64* buf = <u64*> malloc(n * sizeof(u64))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    try:
        for i in range(n):
            buf[i] = <u64> xs[i]
    except BaseException:
        free(buf)
        raise
    return buf


cdef inline u64 _modinv(u64 a, u64 q):
    # Extended Euclid; assumes gcd(a, q) == 1 (q prime, a != 0 mod q).
    cdef i128 old_r = <i128> a
    cdef i128 r = <i128> q
    cdef i128 old_s = 1, s = 0, quo, tmp
    while r != 0:
        quo = old_r / r
        tmp = old_r - quo * r
        old_r = r
        r = tmp
        tmp = old_s - quo * s
        old_s = s
        s = tmp
    if old_s < 0:
        old_s += <i128> q
    return <u64> old_s


def mat_mul(list a, list b, Py_ssize_t n, Py_ssize_t k, Py_ssize_t m, u64 q):
    """Return the n x m product of the n x k and k x m flat matrices."""
    cdef u64* A = _tobuf(a, n * k)
    cdef u64* B = NULL
    cdef u128* acc = NULL
    cdef Py_ssize_t i, j, kk
    cdef u64 aik
    cdef list out = [0] * (n * m)
    try:
        B = _tobuf(b, k * m)
        acc = <u128*> malloc(m * sizeof(u128))
        if acc == NULL:
            raise MemoryError()
        for i in range(n):
            for j in range(m):
                acc[j] = 0
            for kk in range(k):
                aik = A[i * k + kk]
                if aik:
                    for j in range(m):
                        acc[j] += <u128> aik * B[kk * m + j] % q
            for j in range(m):
                out[i * m + j] = <u64> (acc[j] % q)
    finally:
        free(A)
        if B != NULL:
            free(B)
        if acc != NULL:
            free(acc)
    return out


def add_scaled(list acc, list vec, u64 c, u64 q):
    """In place: acc[i] = (acc[i] + c * vec[i]) mod q."""
    cdef Py_ssize_t n = len(acc)
    cdef Py_ssize_t i
    cdef u64 v
    for i in range(n):
        v = <u64> ((<u128> c * <u64> vec[i] + <u64> acc[i]) % q)
        acc[i] = v


def horner_step(list acc, list block, u64 x, u64 q):
    """In place: acc[i] = (acc[i] * x + block[i]) mod q."""
    cdef Py_ssize_t n = len(acc)
    cdef Py_ssize_t i
    cdef u64 v
    for i in range(n):
        v = <u64> ((<u128> x * <u64> acc[i] + <u64> block[i]) % q)
        acc[i] = v


def vandermonde_solve_inplace(list points, list data, Py_ssize_t n,
                              Py_ssize_t width, Py_ssize_t offset, u64 q):
    """Solve n stacked Vandermonde systems of width-sized value chunks.

    Same contract as the pure backend: divided differences followed by
    the in-place Newton-to-monomial contraction, operating on the window
    data[offset : offset + n*width].
    """
    cdef Py_ssize_t total = n * width
    cdef u64* buf = _tobuf(data[offset:offset + total], total)
    cdef u64* pts = NULL
    cdef Py_ssize_t i, j, kk, t, hi, lo
    cdef u64 inv, ti
    cdef u128 diff
    try:
        pts = _tobuf(points, n)
        for j in range(1, n):
            for i in range(n - 1, j - 1, -1):
                diff = (<u128> pts[i] + q - pts[i - j]) % q
                inv = _modinv(<u64> diff, q)
                hi = i * width
                lo = (i - 1) * width
                for t in range(width):
                    diff = (<u128> buf[hi + t] + q - buf[lo + t]) % q
                    buf[hi + t] = <u64> (diff * inv % q)
        for i in range(n - 2, -1, -1):
            ti = pts[i]
            for kk in range(i, n - 1):
                lo = kk * width
                hi = lo + width
                for t in range(width):
                    diff = <u128> ti * buf[hi + t] % q
                    buf[lo + t] = <u64> ((<u128> buf[lo + t] + q - diff) % q)
        for t in range(total):
            data[offset + t] = buf[t]
    finally:
        free(buf)
        if pts != NULL:
            free(pts)


def rref(list mat, Py_ssize_t nrows, Py_ssize_t ncols, u64 q):
    """Reduced row echelon form over F_q with first-nonzero pivoting.

    Returns (rank, reduced) where reduced is a new flat list.
    """
    cdef Py_ssize_t total = nrows * ncols
    cdef u64* m = _tobuf(mat, total)
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t col, r, t, pivot, base, rb, pb
    cdef u64 inv, f, swap
    cdef u128 prod
    cdef list out
    try:
        for col in range(ncols):
            if rank == nrows:
                break
            pivot = -1
            for r in range(rank, nrows):
                if m[r * ncols + col]:
                    pivot = r
                    break
            if pivot < 0:
                continue
            if pivot != rank:
                pb = pivot * ncols
                rb = rank * ncols
                for t in range(ncols):
                    swap = m[pb + t]
                    m[pb + t] = m[rb + t]
                    m[rb + t] = swap
            base = rank * ncols
            inv = _modinv(m[base + col], q)
            for t in range(col, ncols):
                m[base + t] = <u64> (<u128> m[base + t] * inv % q)
            for r in range(nrows):
                if r == rank:
                    continue
                f = m[r * ncols + col]
                if f:
                    rb = r * ncols
                    for t in range(col, ncols):
                        prod = <u128> f * m[base + t] % q
                        m[rb + t] = <u64> ((<u128> m[rb + t] + q - prod) % q)
            rank += 1
        out = [0] * total
        for t in range(total):
            out[t] = m[t]
    finally:
        free(m)
    return rank, out
