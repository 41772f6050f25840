"""Exact dense linear algebra over a CoeffField (small matrices only)."""
from __future__ import annotations


def rref(rows, field):
    """Row-reduce a copy of ``rows``; returns (reduced rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [a * inv for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows, field) -> int:
    return len(rref(rows, field)[1])


def nullspace(rows, ncols, field):
    """Basis of {v : rows @ v = 0} as a list of vectors."""
    if not rows:
        return [[field.one if i == j else field.zero for i in range(ncols)] for j in range(ncols)]
    red, piv = rref(rows, field)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for r, c in zip(red, piv):
            v[c] = -r[f]
        out.append(v)
    return out


def matmul(a, b, field):
    if not a:
        return []
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][t] * b[t][j] for t in range(k)), field.zero) for j in range(m)] for i in range(n)]


def identity(n, field):
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def charpoly(a, field):
    """Coefficients [c_n, ..., c_0] of det(t*I - a) by Berkowitz's division-free method."""
    n = len(a)
    if n == 0:
        return [field.one]
    # vect holds the char poly coefficients of the leading principal submatrix
    vect = [field.one, -a[0][0]]
    for r in range(1, n):
        R = [a[r][j] for j in range(r)]
        C = [a[i][r] for i in range(r)]
        A = [row[:r] for row in a[:r]]
        # Toeplitz column: [1, -a_rr, -R C, -R A C, ...]
        col = [field.one, -a[r][r]]
        v = C
        for _ in range(r):
            col.append(-sum((x * y for x, y in zip(R, v)), field.zero))
            v = [sum((A[i][j] * v[j] for j in range(r)), field.zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            s = field.zero
            for j in range(len(vect)):
                k = i - j
                if 0 <= k < len(col):
                    s += col[k] * vect[j]
            new.append(s)
        vect = new
    return vect
