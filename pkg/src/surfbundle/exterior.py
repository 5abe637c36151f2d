"""Third exterior power of H, the contraction C and its adjoint, and the quotient by H.

A TriVector (element of wedge^3 H) and a TriCovector (functional on it) are
both integer arrays of length binom(2g, 3), indexed by the strictly
increasing index triples in lexicographic order.  A covector on H is a
length-2g array k acting by k(x) = k . x.

The matrix of C* : H^* -> Hom(wedge^3 H, Z) coincides entry for entry with
the matrix of x -> x ^ omega (omega = sum a_i ^ b_i).  That is the
identification Hom(wedge^3 H, Z)/im C* = wedge^3 H / H used here: the same
coordinate vector is read as a functional or as a trivector, and quotient
representatives are reduced modulo one and the same column lattice.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from . import intlinalg
from .errors import DimensionError, NotInImage
from .symplectic import SymplecticLattice


@lru_cache(maxsize=None)
def triples(rank):
    return tuple(combinations(range(rank), 3))


@lru_cache(maxsize=None)
def triple_index(rank):
    return {t: n for n, t in enumerate(triples(rank))}


def tri_length(lattice):
    return comb(lattice.rank, 3)


def check_tri(lattice, t, what="trivector"):
    t = np.asarray(t)
    n = tri_length(lattice)
    if t.shape != (n,):
        raise DimensionError(f"{what} must have length {n} for genus {lattice.genus}, got shape {t.shape}")
    return t.astype(np.int64)


def wedge3(x, y, z):
    """Coordinates of x ^ y ^ z: the 3x3 minors of the matrix [x y z]."""
    x, y, z = (np.asarray(v, dtype=np.int64) for v in (x, y, z))
    if not (x.shape == y.shape == z.shape and x.ndim == 1):
        raise DimensionError("wedge3 needs three vectors of the same length")
    tr = np.array(triples(len(x)), dtype=np.int64)
    if len(tr) == 0:
        return np.zeros(0, dtype=np.int64)
    i, j, k = tr[:, 0], tr[:, 1], tr[:, 2]
    return (
        x[i] * (y[j] * z[k] - y[k] * z[j])
        - x[j] * (y[i] * z[k] - y[k] * z[i])
        + x[k] * (y[i] * z[j] - y[j] * z[i])
    )


def triple_vector(lattice, i, j, k):
    """wedge3 of three basis vectors (indices or labels)."""
    return wedge3(lattice.basis_vector(i), lattice.basis_vector(j), lattice.basis_vector(k))


def dual_triple(lattice, i, j, k):
    """The TriCovector dual to the basis triple e_i ^ e_j ^ e_k (sign included)."""
    return triple_vector(lattice, i, j, k)


def dual_covector(lattice, which):
    """The covector k with k(e_j) = delta_ij, e.g. "dual of a2"."""
    return lattice.basis_vector(which)


def evaluate(f, t):
    """Apply a TriCovector to a TriVector."""
    return int(np.dot(np.asarray(f, dtype=np.int64), np.asarray(t, dtype=np.int64)))


def to_tensor(lattice, f):
    """Dense alternating n x n x n array with entry [i,j,k] = f(e_i ^ e_j ^ e_k)."""
    f = check_tri(lattice, f)
    n = lattice.rank
    t = np.zeros((n, n, n), dtype=np.int64)
    for idx, (i, j, k) in enumerate(triples(n)):
        v = f[idx]
        if v:
            t[i, j, k] = t[j, k, i] = t[k, i, j] = v
            t[j, i, k] = t[i, k, j] = t[k, j, i] = -v
    return t


@lru_cache(maxsize=None)
def _contraction_matrix(genus):
    lat = SymplecticLattice(genus)
    j = lat.gram
    tr = triples(lat.rank)
    c = np.zeros((lat.rank, len(tr)), dtype=np.int64)
    for n, (a, b, d) in enumerate(tr):
        # C(x^y^z) = i(y,z) x + i(z,x) y + i(x,y) z
        c[a, n] += j[b, d]
        c[b, n] += j[d, a]
        c[d, n] += j[a, b]
    c.setflags(write=False)
    return c


def contraction_matrix(lattice):
    """The 2g x binom(2g,3) matrix of C."""
    return _contraction_matrix(lattice.genus)


def cstar_matrix(lattice):
    """The binom(2g,3) x 2g matrix of C*, the transpose of C."""
    return contraction_matrix(lattice).T


def contraction(lattice, t):
    t = check_tri(lattice, t)
    return contraction_matrix(lattice) @ t


def cstar(lattice, k):
    """C*(k)(x^y^z) = k(x) i(y,z) + k(y) i(z,x) + k(z) i(x,y)."""
    k = lattice.check_vector(k)
    return cstar_matrix(lattice) @ k


@lru_cache(maxsize=None)
def _wedge_omega_matrix(genus):
    lat = SymplecticLattice(genus)
    cols = []
    for m in range(lat.rank):
        col = np.zeros(comb(lat.rank, 3), dtype=np.int64)
        x = lat.basis_vector(m)
        for i in range(genus):
            col += wedge3(x, lat.basis_vector(2 * i), lat.basis_vector(2 * i + 1))
        cols.append(col)
    w = np.stack(cols, axis=1)
    w.setflags(write=False)
    return w


def wedge_omega_matrix(lattice):
    """Columns are e_m ^ omega for m = 0 .. 2g-1."""
    return _wedge_omega_matrix(lattice.genus)


def contraction_scalar_on_omega(lattice):
    """The scalar s with C(x ^ omega) = s x for all x, or None if C acts non-scalarly."""
    prod = contraction_matrix(lattice) @ wedge_omega_matrix(lattice)
    s = int(prod[0, 0])
    if np.array_equal(prod, s * np.eye(lattice.rank, dtype=np.int64)):
        return s
    return None


@dataclass(frozen=True)
class QuotientInfo:
    genus: int
    rank: int
    elementary_divisors: tuple
    primitive: bool

    @property
    def torsion(self):
        return tuple(d for d in self.elementary_divisors if d > 1)


@lru_cache(maxsize=None)
def quotient_info(genus):
    """Rank and torsion of wedge^3 H / (H ^ omega), from the Smith form of the embedding."""
    lat = SymplecticLattice(genus)
    w = wedge_omega_matrix(lat)
    divs = tuple(intlinalg.elementary_divisors(w))
    rank = comb(lat.rank, 3) - len(divs)
    return QuotientInfo(genus, rank, divs, all(d == 1 for d in divs) and len(divs) == lat.rank)


def quotient_rank(genus):
    return quotient_info(genus).rank


@lru_cache(maxsize=None)
def _sublattice_hnf(genus):
    w = _wedge_omega_matrix(genus)
    basis, pivots = intlinalg.hnf_rows(w.T)
    return tuple(tuple(r) for r in basis), tuple(pivots)


@dataclass(frozen=True)
class JohnsonClass:
    """An element of wedge^3 H / H held as its canonical representative."""

    genus: int
    representative: tuple

    @property
    def is_zero(self):
        return not any(self.representative)

    def as_array(self):
        return np.array(self.representative, dtype=np.int64)


def quotient_reduce(lattice, t):
    """Canonical representative of t modulo the lattice H ^ omega (= im C*).

    Accepts a TriVector or TriCovector; both use the same coordinates.
    """
    t = check_tri(lattice, t)
    basis, pivots = _sublattice_hnf(lattice.genus)
    rep = intlinalg.reduce_mod_rows(t.tolist(), basis, pivots)
    return JohnsonClass(lattice.genus, tuple(rep))


@lru_cache(maxsize=None)
def _cstar_solver(genus):
    return intlinalg.IntegerSolver(_contraction_matrix(genus).T)


def solve_cstar(lattice, f):
    """The unique integral covector alpha with C*(alpha) = f.

    Raises NotInImage when f is not in the image of C* over Z.
    """
    f = check_tri(lattice, f, what="tricovector")
    x = _cstar_solver(lattice.genus).solve(f.tolist())
    if x is None:
        raise NotInImage("functional is not in the image of C* over the integers")
    alpha = np.array(x, dtype=np.int64)
    if not np.array_equal(cstar(lattice, alpha), f):
        raise ArithmeticError("integer solve returned a non-solution")
    return alpha


def in_image_of_cstar(lattice, f):
    try:
        solve_cstar(lattice, f)
    except NotInImage:
        return False
    return True
