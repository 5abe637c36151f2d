"""The symplectic lattice H_1(Sigma_g; Z), transvections, and (co)invariants.

Basis order is a_1, b_1, ..., a_g, b_g, so the Gram matrix is block diagonal
with blocks [[0, 1], [-1, 0]] and the symplectic partner of index 2i is 2i+1.
Vectors and matrices are plain integer numpy arrays.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import intlinalg
from .errors import DimensionError, GenusError, NonSymplecticError


@dataclass(frozen=True)
class SymplecticLattice:
    """Rank-2g lattice with its intersection form.

    ``prefix`` only affects labels: ("a", "b") gives a1, b1, ...; the
    bundle ring labels its fiber lattice with ("x", "y").
    """

    genus: int
    prefix: tuple = ("a", "b")

    def __post_init__(self):
        if not isinstance(self.genus, (int, np.integer)) or isinstance(self.genus, bool):
            raise GenusError(f"genus must be an integer, got {self.genus!r}")
        if self.genus < 2:
            raise GenusError(f"genus must be at least 2, got {self.genus}")

    @property
    def rank(self):
        return 2 * self.genus

    @cached_property
    def labels(self):
        a, b = self.prefix
        out = []
        for i in range(1, self.genus + 1):
            out += [f"{a}{i}", f"{b}{i}"]
        return tuple(out)

    @cached_property
    def gram(self):
        j = np.zeros((self.rank, self.rank), dtype=np.int64)
        for i in range(self.genus):
            j[2 * i, 2 * i + 1] = 1
            j[2 * i + 1, 2 * i] = -1
        j.setflags(write=False)
        return j

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise DimensionError(f"unknown basis label {label!r} for genus {self.genus}") from None

    def basis_vector(self, which):
        """Unit vector for an index or a label such as "b2"."""
        i = self.index(which) if isinstance(which, str) else int(which)
        v = np.zeros(self.rank, dtype=np.int64)
        v[i] = 1
        return v

    def basis(self):
        return [self.basis_vector(i) for i in range(self.rank)]

    def partner(self, i):
        """Index of the symplectic partner (a_k <-> b_k)."""
        return i ^ 1

    def dual_vector(self, i):
        """The vector v with pairing(v, e_j) = delta_ij, namely J e_i."""
        return np.array(self.gram[:, i], dtype=np.int64)

    def check_vector(self, x):
        x = np.asarray(x)
        if x.shape != (self.rank,):
            raise DimensionError(f"expected a vector of length {self.rank}, got shape {x.shape}")
        return x.astype(np.int64)


def pairing(lattice, x, y):
    """Algebraic intersection number x^T J y."""
    x = lattice.check_vector(x)
    y = lattice.check_vector(y)
    return int(x @ lattice.gram @ y)


def check_symplectic(lattice, m, name="matrix"):
    """Validate M^T J M = J and return M as an int64 array.

    Raises NonSymplecticError carrying the first violated entry.
    """
    m = np.asarray(m)
    n = lattice.rank
    if m.shape != (n, n):
        raise DimensionError(f"{name} has shape {m.shape}, expected ({n}, {n})")
    m = m.astype(np.int64)
    lhs = m.T @ lattice.gram @ m
    bad = np.argwhere(lhs != lattice.gram)
    if len(bad):
        i, j = (int(t) for t in bad[0])
        witness = (i, j, int(lhs[i, j]), int(lattice.gram[i, j]))
        raise NonSymplecticError(
            f"{name} is not symplectic: (M^T J M)[{i},{j}] = {witness[2]} but J[{i},{j}] = {witness[3]}",
            witness=witness,
        )
    return m


def is_symplectic(lattice, m):
    try:
        check_symplectic(lattice, m)
    except NonSymplecticError:
        return False
    return True


def is_torelli(m):
    m = np.asarray(m)
    return bool(np.array_equal(m, np.eye(m.shape[0], dtype=m.dtype)))


def transvection(lattice, c):
    """Matrix of x -> x + i(x, c) c, the homological action of a Dehn twist about c."""
    c = lattice.check_vector(c)
    m = np.eye(lattice.rank, dtype=np.int64) + np.outer(c, lattice.gram @ c)
    return m


def inverse_transvection(lattice, c):
    c = lattice.check_vector(c)
    return np.eye(lattice.rank, dtype=np.int64) - np.outer(c, lattice.gram @ c)


def _checked(lattice, mats):
    return [check_symplectic(lattice, m, name=f"matrix {k}") for k, m in enumerate(mats)]


def invariants(lattice, mats):
    """Basis (primitive integer vectors) of the rational subspace fixed by every matrix.

    An empty list means the invariant space is zero.
    """
    mats = _checked(lattice, mats)
    n = lattice.rank
    if not mats:
        return lattice.basis()
    stacked = np.vstack([m - np.eye(n, dtype=np.int64) for m in mats])
    return [np.array(v, dtype=np.int64) for v in intlinalg.nullspace_q(stacked, ncols=n)]


def _image_generators(lattice, mats):
    n = lattice.rank
    if not mats:
        return np.zeros((n, 0), dtype=np.int64)
    return np.hstack([m - np.eye(n, dtype=np.int64) for m in mats])


def coinvariants_rank(lattice, mats):
    """Rank of Q^{2g} / span{(M - I) v}."""
    mats = _checked(lattice, mats)
    gens = _image_generators(lattice, mats)
    if gens.shape[1] == 0:
        return lattice.rank
    return lattice.rank - intlinalg.rank_q(gens)


def coinvariants_divisors(lattice, mats):
    """Integral coinvariants Z^{2g}/im as (free rank, torsion divisors > 1).

    Diagnostic companion to the rational rank, from the Smith form of the
    horizontally stacked (M - I) blocks.
    """
    mats = _checked(lattice, mats)
    gens = _image_generators(lattice, mats)
    if gens.shape[1] == 0:
        return lattice.rank, []
    divs = intlinalg.elementary_divisors(gens)
    return lattice.rank - len(divs), [d for d in divs if d > 1]
