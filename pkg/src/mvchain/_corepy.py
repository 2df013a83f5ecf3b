"""Pure-Python arithmetic kernels.

Fallback backend mirroring the compiled interface of ``mvchain._core``.
All kernels operate on flat row-major lists of canonical residues in
[0, q).  Lengths and value ranges are the caller's responsibility;
``mvchain.fp_field`` and friends validate before calling in.
"""

BACKEND = "python"


def mat_mul(a, b, n, k, m, q):
    """Return the n x m product of the n x k and k x m flat matrices."""
    out = [0] * (n * m)
    for i in range(n):
        row = [0] * m
        base_a = i * k
        for kk in range(k):
            aik = a[base_a + kk]
            if aik:
                base_b = kk * m
                for j in range(m):
                    row[j] += aik * b[base_b + j]
        base_o = i * m
        for j in range(m):
            out[base_o + j] = row[j] % q
    return out


def add_scaled(acc, vec, c, q):
    """In place: acc[i] = (acc[i] + c * vec[i]) mod q."""
    for i in range(len(acc)):
        acc[i] = (acc[i] + c * vec[i]) % q


def horner_step(acc, block, x, q):
    """In place: acc[i] = (acc[i] * x + block[i]) mod q."""
    for i in range(len(acc)):
        acc[i] = (acc[i] * x + block[i]) % q


def vandermonde_solve_inplace(points, data, n, width, offset, q):
    """Solve n stacked Vandermonde systems of width-sized value chunks.

    data[offset + j*width : offset + (j+1)*width] holds the value at
    points[j]; on return the same window holds the monomial coefficients
    (degree index j), computed by Newton divided differences and the
    usual in-place Newton-to-monomial contraction.
    """
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            inv = pow((points[i] - points[i - j]) % q, -1, q)
            hi = offset + i * width
            lo = offset + (i - 1) * width
            for t in range(width):
                data[hi + t] = (data[hi + t] - data[lo + t]) * inv % q
    for i in range(n - 2, -1, -1):
        ti = points[i]
        for kk in range(i, n - 1):
            lo = offset + kk * width
            hi = lo + width
            for t in range(width):
                data[lo + t] = (data[lo + t] - ti * data[hi + t]) % q


def rref(mat, nrows, ncols, q):
    """Reduced row echelon form over F_q with first-nonzero pivoting.

    Returns (rank, reduced) where reduced is a new flat list.
    """
    m = [v % q for v in mat]
    rank = 0
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
            pb, rb = pivot * ncols, rank * ncols
            for t in range(ncols):
                m[pb + t], m[rb + t] = m[rb + t], m[pb + t]
        base = rank * ncols
        inv = pow(m[base + col], -1, q)
        for t in range(col, ncols):
            m[base + t] = m[base + t] * inv % q
        for r in range(nrows):
            if r == rank:
                continue
            f = m[r * ncols + col]
            if f:
                rb = r * ncols
                for t in range(col, ncols):
                    m[rb + t] = (m[rb + t] - f * m[base + t]) % q
        rank += 1
    return rank, m
