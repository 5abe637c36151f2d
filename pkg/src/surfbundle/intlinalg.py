"""Exact integer and rational linear algebra on small dense matrices.

Everything here works on Python ints (arbitrary precision); numpy arrays are
accepted as input and converted.  Matrices are lists of rows.
"""

from fractions import Fraction
from math import gcd

import numpy as np


def to_rows(a):
    """Convert a 2-d array-like to a list of lists of Python ints."""
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    return [[int(v) for v in row] for row in arr.tolist()]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(rows, ncols=None):
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def matmul(a, b):
    bt = transpose(b, len(b[0]) if b else 0)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def vector_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive(v):
    """Scale an integer vector to be primitive with positive leading entry."""
    g = vector_gcd(v)
    if g == 0:
        return [0] * len(v)
    lead = next(x for x in v if x != 0)
    s = g if lead > 0 else -g
    return [x // s for x in v]


# ---------------------------------------------------------------- rational

def rref(a):
    """Reduced row echelon form over Q. Returns (rows of Fractions, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in to_rows(a)] if len(a) else []
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank_q(a):
    arr = np.asarray(a)
    if arr.size == 0:
        return 0
    return len(rref(arr)[1])


def nullspace_q(a, ncols=None):
    """Basis of {v : A v = 0} over Q, as primitive integer vectors.

    Deterministic: one vector per free column, in increasing column order.
    """
    arr = np.asarray(a)
    if arr.size == 0:
        n = ncols if ncols is not None else (arr.shape[1] if arr.ndim == 2 else 0)
        return [[int(i == j) for j in range(n)] for i in range(n)]
    m, pivots = rref(arr)
    n = arr.shape[1]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(m, pivots):
            v[p] = -row[f]
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        basis.append(primitive([int(x * den) for x in v]))
    return basis


def solve_q(a, b):
    """One rational solution of A x = b, or None."""
    rows = to_rows(a)
    aug = [row + [int(bi)] for row, bi in zip(rows, b)]
    m, pivots = rref(aug)
    n = len(rows[0])
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(m, pivots):
        x[p] = row[n]
    return x


def det_int(a):
    """Determinant by fraction-free Bareiss elimination."""
    m = to_rows(a)
    n = len(m)
    if n == 0:
        return 1
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            p = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if p is None:
                return 0
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------- integral

def hnf_rows(a):
    """Row-style Hermite normal form of the lattice spanned by the rows of A.

    Returns ``(basis, pivots)``: nonzero echelon rows with positive pivots,
    strictly increasing pivot columns, and entries above each pivot reduced
    into ``[0, pivot)``.  The result depends only on the row lattice.
    """
    rows = to_rows(a) if len(a) else []
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    r = 0
    pivots = []
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, nrows) if rows[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(rows[i][c]))
            rows[r], rows[p] = rows[p], rows[r]
            done = True
            for i in range(r + 1, nrows):
                if rows[i][c] != 0:
                    q = rows[i][c] // rows[r][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    if rows[i][c] != 0:
                        done = False
            if done:
                break
        if r < nrows and rows[r][c] != 0:
            if rows[r][c] < 0:
                rows[r] = [-x for x in rows[r]]
            for i in range(r):
                q = rows[i][c] // rows[r][c]
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == nrows:
                break
    return rows[:r], pivots


def reduce_mod_rows(v, basis, pivots):
    """Canonical representative of v modulo the lattice in Hermite form."""
    v = [int(x) for x in v]
    for row, c in zip(basis, pivots):
        q = v[c] // row[c]
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return v


def smith_form(a):
    """Smith normal form with transforms: returns (U, D, V) with U A V = D.

    U and V are unimodular; D is diagonal with nonnegative entries
    d_1 | d_2 | ... followed by zeros.
    """
    d = to_rows(a)
    m = len(d)
    n = len(d[0]) if m else 0
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        d[dst] = [x + q * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in d:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        entries = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            clean = True
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(i, t, -(d[i][t] // d[t][t]))
                    if d[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(j, t, -(d[t][j] // d[t][t]))
                    if d[t][j]:
                        clean = False
            if not clean:
                cands = [(abs(d[i][t]), i, t) for i in range(t, m) if d[i][t]]
                cands += [(abs(d[t][j]), t, j) for j in range(t, n) if d[t][j]]
                _, i1, j1 = min(cands)
                swap_rows(t, i1)
                swap_cols(t, j1)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % d[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, d, v


def elementary_divisors(a):
    """Nonzero diagonal entries of the Smith normal form."""
    _, d, _ = smith_form(a)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


class IntegerSolver:
    """Reusable exact solver for A x = b over Z, built from one Smith decomposition."""

    def __init__(self, a):
        self.shape = np.asarray(a).shape
        self.u, d, self.v = smith_form(a)
        k = min(self.shape)
        self.diag = [d[i][i] for i in range(k)]
        self.rank = sum(1 for x in self.diag if x)

    def solve(self, b):
        """Return one integer solution as a list of ints, or None if none exists."""
        m, n = self.shape
        if len(b) != m:
            raise ValueError(f"right-hand side has length {len(b)}, expected {m}")
        c = matvec(self.u, [int(x) for x in b])
        y = [0] * n
        for i, ci in enumerate(c):
            if i < self.rank:
                if ci % self.diag[i]:
                    return None
                y[i] = ci // self.diag[i]
            elif ci:
                return None
        return matvec(self.v, y)


def solve_int(a, b):
    return IntegerSolver(a).solve(b)


def inverse_unimodular(a):
    """Exact inverse of a square integer matrix with determinant +-1."""
    rows = to_rows(a)
    n = len(rows)
    solver = IntegerSolver(rows)
    cols = []
    for j in range(n):
        x = solver.solve([int(i == j) for i in range(n)])
        if x is None:
            raise ValueError("matrix is not unimodular")
        cols.append(x)
    return transpose(cols)


def ext_gcd(a, b):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def bezout_vector(r):
    """Integer vector c with sum(r_i c_i) = gcd(r)."""
    r = [int(x) for x in r]
    c = [0] * len(r)
    g = 0
    for i, x in enumerate(r):
        g2, s, t = ext_gcd(g, x)
        c = [s * y for y in c]
        c[i] = t
        g = g2
    return c
