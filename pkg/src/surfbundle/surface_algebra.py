"""Intersection rings of closed surfaces and their graded tensor products.

Used as an independent reference for trivial-looking bundle rings.
"""

import numpy as np


class SurfaceAlgebra:
    """H_*(Sigma; Z) with basis pt, e_1..e_2g, [S]; products x.y = i(x, y) pt, [S] unit."""

    def __init__(self, lattice):
        self.lattice = lattice
        self.size = lattice.rank + 2
        self.point = 0
        self.fundamental = lattice.rank + 1
        self.degrees = np.array([0] + [1] * lattice.rank + [2])

    def h1(self, i):
        return 1 + i

    def table(self):
        n = self.size
        t = np.zeros((n, n, n), dtype=np.int64)
        top = self.fundamental
        for i in range(n):
            t[top, i, i] = 1
            t[i, top, i] = 1
        r = self.lattice.rank
        t[1:r + 1, 1:r + 1, self.point] = self.lattice.gram
        return t


def tensor_product(left, right):
    """Structure tensor of left (x) right with the Koszul sign (-1)^(c(Y) c(X')).

    c is the cohomological degree 2 - deg in each factor.  Basis index of
    X (x) Y is i * right.size + j.
    """
    tl, tr = left.table(), right.table()
    cl = 2 - left.degrees
    cr = 2 - right.degrees
    # sign[j, i'] for Y = right basis j, X' = left basis i'
    sign = np.where((np.outer(cr, cl) % 2) == 1, -1, 1)
    t = np.einsum("ikm,jln,jk->ijklmn", tl, tr, sign)
    nl, nr = left.size, right.size
    return t.reshape(nl * nr, nl * nr, nl * nr)
