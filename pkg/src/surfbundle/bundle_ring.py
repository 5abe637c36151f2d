"""Graded intersection ring H_*(E; Z) of a surface bundle over a surface with Torelli monodromy.

Degrees are homological (0..4); the product of classes of degrees p and q
lands in degree p + q - 4 and is Poincare dual to the cup product, so graded
commutativity carries the sign (-1)^((4-p)(4-q)).

Canonical basis per degree (h = base genus, g = fiber genus):

    4: [E]
    3: E_b (b over the base basis), then M_z (z over the fiber basis)
    2: [F], C, Sigma_{b,z} (b-major)
    1: eps_b, mu_z, dual to E_b, M_z:  eps_b . E_b' = mu_z . M_z' = delta pt
    0: pt

The multiplication table is determined by two pieces of data: the product
T : H_3 x H_3 -> H_2 and the pairing G on H_2.  Every other product follows
from Poincare duality and associativity.  Coefficients the input does not
determine are carried as masks and never silently reported as zero.
"""

from dataclasses import dataclass, field
from itertools import count
from typing import Optional

import numpy as np

from . import exterior, intlinalg
from .errors import (
    DimensionError,
    InconsistentData,
    IndeterminatePairing,
    NotInImage,
    SurfBundleError,
)
from .symplectic import SymplecticLattice

FIBER_PREFIX = ("x", "y")
BASE_PREFIX = ("a", "b")

_ring_ids = count(1)


def cohomological_sign(p, q):
    return -1 if ((4 - p) * (4 - q)) % 2 else 1


def masked_einsum(subscripts, *operands):
    """einsum over (values, mask) pairs.

    An output entry is indeterminate when some contributing product has
    every factor possibly nonzero and at least one factor indeterminate.
    Masked input values are ignored (treated as placeholders).
    """
    vals = [np.where(m, 0, v) for v, m in operands]
    possible = [((v != 0) | m).astype(np.int64) for v, m in operands]
    definite = [((v != 0) & ~m).astype(np.int64) for v, m in operands]
    value = np.einsum(subscripts, *vals, optimize=True)
    unknown = np.einsum(subscripts, *possible, optimize=True) > np.einsum(subscripts, *definite, optimize=True)
    return np.where(unknown, 0, value), unknown


@dataclass(frozen=True)
class BundleData:
    """Input for a Torelli bundle.

    ``tau`` has one row per base basis vector: row b is the lift tau~(e_b)
    as a TriCovector on the fiber.  ``e_param`` is C.C, or None when unknown.
    """

    base: SymplecticLattice
    fiber: SymplecticLattice
    tau: np.ndarray = field(compare=False)
    e_param: Optional[int] = 0
    johnson_kernel: bool = False

    @classmethod
    def create(cls, genus_fiber, genus_base, tau=None, e_param=0, johnson_kernel=False):
        """Build from genera; ``tau`` may be an array, a dict keyed by base labels, or None (zero)."""
        base = SymplecticLattice(genus_base, BASE_PREFIX)
        fiber = SymplecticLattice(genus_fiber, FIBER_PREFIX)
        n = exterior.tri_length(fiber)
        if tau is None:
            tau = np.zeros((base.rank, n), dtype=np.int64)
        elif isinstance(tau, dict):
            missing = [lab for lab in base.labels if lab not in tau]
            if missing:
                raise DimensionError(f"tau table incomplete: no lift for generator {missing[0]}")
            tau = np.array([tau[lab] for lab in base.labels], dtype=np.int64)
        return cls(base, fiber, np.asarray(tau, dtype=np.int64), e_param, johnson_kernel)

    def __post_init__(self):
        tau = np.asarray(self.tau)
        n = exterior.tri_length(self.fiber)
        if tau.ndim != 2 or tau.shape[0] != self.base.rank:
            raise DimensionError(
                f"tau table incomplete: need {self.base.rank} lifts, got shape {tau.shape}"
            )
        if tau.shape[1] != n:
            raise DimensionError(f"tau lifts must have length {n}, got {tau.shape[1]}")
        object.__setattr__(self, "tau", tau.astype(np.int64))

    def tau_of(self, b):
        """tau~ on a base class b (linear extension)."""
        return self.base.check_vector(b) @ self.tau

    def lift_covectors(self):
        """Rows k_b with tau~(e_b) = C*(k_b); raises NotInImage if some lift is off the kernel."""
        return np.array([exterior.solve_cstar(self.fiber, row) for row in self.tau], dtype=np.int64)

    def reduces_to_zero(self):
        return all(exterior.quotient_reduce(self.fiber, row).is_zero for row in self.tau)


@dataclass(frozen=True)
class HomologyClass:
    degree: int
    coeffs: tuple
    indeterminate: frozenset = frozenset()
    ring_id: int = 0

    def as_array(self):
        return np.array(self.coeffs, dtype=np.int64)

    def mask(self):
        m = np.zeros(len(self.coeffs), dtype=bool)
        m[list(self.indeterminate)] = True
        return m

    @property
    def is_determined(self):
        return not self.indeterminate

    def __add__(self, other):
        _same_ring(self, other)
        if self.degree != other.degree:
            raise DimensionError("cannot add classes of different degrees")
        coeffs = tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        return HomologyClass(self.degree, coeffs, self.indeterminate | other.indeterminate, self.ring_id)

    def __neg__(self):
        return HomologyClass(self.degree, tuple(-a for a in self.coeffs), self.indeterminate, self.ring_id)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k):
        if not isinstance(k, (int, np.integer)):
            return NotImplemented
        ind = self.indeterminate if k else frozenset()
        return HomologyClass(self.degree, tuple(int(k) * a for a in self.coeffs), ind, self.ring_id)


def _same_ring(u, v):
    if u.ring_id != v.ring_id:
        raise SurfBundleError("operands belong to different rings")


def _basis_labels(base, fiber):
    e = tuple(f"E_{lab}" for lab in base.labels)
    m = tuple(f"M_{lab}" for lab in fiber.labels)
    sig = tuple(f"Sigma_{b},{z}" for b in base.labels for z in fiber.labels)
    eps = tuple(f"eps_{lab}" for lab in base.labels)
    mu = tuple(f"mu_{lab}" for lab in fiber.labels)
    return {4: ("[E]",), 3: e + m, 2: ("[F]", "C") + sig, 1: eps + mu, 0: ("pt",)}


def _assemble(base, fiber, tau, alpha, alpha_mask, e, e_mask):
    """Product tables {(p, q): (values, mask)} for p + q >= 4."""
    hb, fb = base.rank, fiber.rank
    jb, jf = base.gram, fiber.gram
    n3 = hb + fb
    n2 = 2 + hb * fb
    sizes = {4: 1, 3: n3, 2: n2, 1: n3, 0: 1}

    s = -np.kron(jb, jf)
    gram2 = np.zeros((n2, n2), dtype=np.int64)
    gmask = np.zeros((n2, n2), dtype=bool)
    gram2[0, 1] = gram2[1, 0] = 1
    gram2[1, 1] = e
    gmask[1, 1] = e_mask
    gram2[2:, 2:] = s

    t = np.zeros((n3, n3, n2), dtype=np.int64)
    tmask = np.zeros((n3, n3, n2), dtype=bool)
    t[:hb, :hb, 0] = jb
    for b in range(hb):
        for x in range(fb):
            t[hb + x, b, 2 + b * fb + x] = 1
            t[b, hb + x, 2 + b * fb + x] = -1
    t[hb:, hb:, 0] = alpha
    tmask[hb:, hb:, 0] = alpha_mask
    t[hb:, hb:, 1] = jf
    # r[x, y, (b, z)] = tau~(b)(x ^ y ^ z); the Sigma-part of M_x.M_y is S r
    tens = np.stack([exterior.to_tensor(fiber, row) for row in tau])
    r = tens.transpose(1, 2, 0, 3).reshape(fb, fb, hb * fb)
    t[hb:, hb:, 2:] = r @ s

    tabs = {}
    for q in range(5):
        eye = np.eye(sizes[q], dtype=np.int64)
        tabs[4, q] = (eye[None, :, :], np.zeros((1, sizes[q], sizes[q]), dtype=bool))
        tabs[q, 4] = (eye[:, None, :], np.zeros((sizes[q], 1, sizes[q]), dtype=bool))
    tabs[3, 3] = (t, tmask)
    tabs[2, 2] = (gram2[:, :, None], gmask[:, :, None])
    # coefficient of the dual of Y in X.W is (X.Y).W
    v32, m32 = masked_einsum("xyk,kw->xwy", (t, tmask), (gram2, gmask))
    tabs[3, 2] = (v32, m32)
    tabs[2, 3] = (v32.transpose(1, 0, 2), m32.transpose(1, 0, 2))
    eye3 = np.eye(n3, dtype=np.int64)
    no = np.zeros((n3, n3, 1), dtype=bool)
    tabs[1, 3] = (eye3[:, :, None], no)
    tabs[3, 1] = (-eye3[:, :, None], no.copy())
    return sizes, tabs


def _transform(tabs, frames, inverses):
    """Rewrite tables in the basis whose degree-k vectors are the columns of frames[k]."""
    out = {}
    for (p, q), (v, m) in tabs.items():
        r = p + q - 4
        ops = [
            (frames[p], np.zeros(frames[p].shape, dtype=bool)),
            (frames[q], np.zeros(frames[q].shape, dtype=bool)),
            (v, m),
            (inverses[r], np.zeros(inverses[r].shape, dtype=bool)),
        ]
        out[p, q] = masked_einsum("ai,bj,abk,lk->ijl", *ops)
    return out


def _kernel_frames(base, fiber, k_rows):
    """Change of basis carrying the zero-lift ring onto the ring with lifts C*(k_b).

    M'_x = M_x + E_{u(x)} with i_B(u(x), b) = k_b(x); then
    Sigma'_{b,x} = Sigma_{b,x} + k_b(x)[F] and C' is the unique class with
    C'.Sigma' = 0, C'.[F] = 1, C'.C' = 0.
    """
    hb, fb = base.rank, fiber.rank
    u = base.gram @ k_rows
    a3 = np.eye(hb + fb, dtype=np.int64)
    a3[:hb, hb:] = u
    s = -np.kron(base.gram, fiber.gram)
    w = k_rows.reshape(-1)
    c = -(s @ w)
    quad = int(c @ s @ c)
    if quad % 2:
        raise ArithmeticError("Sigma pairing is not even")
    n2 = 2 + hb * fb
    a2 = np.eye(n2, dtype=np.int64)
    a2[0, 1] = -quad // 2
    a2[2:, 1] = c
    a2[0, 2:] = w
    a3inv = np.array(intlinalg.inverse_unimodular(a3), dtype=np.int64)
    a2inv = np.array(intlinalg.inverse_unimodular(a2), dtype=np.int64)
    one = np.ones((1, 1), dtype=np.int64)
    frames = {4: one, 3: a3, 2: a2, 1: a3inv.T, 0: one}
    inverses = {4: one, 3: a3inv, 2: a2inv, 1: a3.T, 0: one}
    return frames, inverses


class BundleRing:
    """Immutable ring handle; build with :func:`build_ring`."""

    def __init__(self, data, sizes, tables, frames, alpha, alpha_mask):
        self.data = data
        self.base = data.base
        self.fiber = data.fiber
        self.sizes = sizes
        self.labels = _basis_labels(data.base, data.fiber)
        self._tables = tables
        self.frames = frames
        self.fiber_coefficients = alpha
        self.fiber_coefficient_mask = alpha_mask
        self.ring_id = next(_ring_ids)
        self._index = {lab: (k, i) for k, labs in self.labels.items() for i, lab in enumerate(labs)}
        for v, _ in tables.values():
            v.setflags(write=False)

    @property
    def johnson_kernel(self):
        return self.data.johnson_kernel

    @property
    def e_param(self):
        return self.data.e_param

    def rank(self, k):
        return self.sizes[k]

    def table(self, p, q):
        """(values, mask) with values[i, j] the coefficient vector of basis_p[i] . basis_q[j]."""
        return self._tables[p, q]

    def tables(self):
        return dict(self._tables)

    # -------------------------------------------------------------- classes

    def basis_class(self, label):
        try:
            k, i = self._index[label]
        except KeyError:
            raise DimensionError(f"unknown basis class {label!r}") from None
        coeffs = [0] * self.sizes[k]
        coeffs[i] = 1
        return HomologyClass(k, tuple(coeffs), frozenset(), self.ring_id)

    def __getitem__(self, label):
        return self.basis_class(label)

    def element(self, degree, coeffs, indeterminate=()):
        coeffs = tuple(int(c) for c in coeffs)
        if degree not in self.sizes or len(coeffs) != self.sizes[degree]:
            raise DimensionError(f"degree {degree} classes need {self.sizes.get(degree)} coefficients")
        return HomologyClass(degree, coeffs, frozenset(indeterminate), self.ring_id)

    def zero(self, degree):
        return self.element(degree, [0] * self.sizes[degree])

    def sigma(self, b, z):
        """Sigma_{b,z} for base class b and fiber class z (bilinear)."""
        coeffs = np.zeros(self.sizes[2], dtype=np.int64)
        coeffs[2:] = np.kron(self.base.check_vector(b), self.fiber.check_vector(z))
        return self.element(2, coeffs)

    def e_class(self, b):
        coeffs = np.zeros(self.sizes[3], dtype=np.int64)
        coeffs[: self.base.rank] = self.base.check_vector(b)
        return self.element(3, coeffs)

    def m_class(self, z):
        coeffs = np.zeros(self.sizes[3], dtype=np.int64)
        coeffs[self.base.rank:] = self.fiber.check_vector(z)
        return self.element(3, coeffs)

    def describe(self, u):
        """Sparse {label: coefficient or "?"} view of a class."""
        out = {}
        for i, lab in enumerate(self.labels[u.degree]):
            if i in u.indeterminate:
                out[lab] = "?"
            elif u.coeffs[i]:
                out[lab] = u.coeffs[i]
        return out

    # -------------------------------------------------------------- products

    def product(self, u, v):
        """Intersection product; results below degree 0 are the zero class of degree 0."""
        _same_ring(u, v)
        if u.ring_id != self.ring_id:
            raise SurfBundleError("operands belong to a different ring")
        p, q = u.degree, v.degree
        if p + q < 4:
            return self.zero(0)
        val, mask = masked_einsum(
            "i,j,ijk->k",
            (u.as_array(), u.mask()),
            (v.as_array(), v.mask()),
            self._tables[p, q],
        )
        return self.element(p + q - 4, val, np.flatnonzero(mask).tolist())

    def multiply(self, *classes):
        out = classes[0]
        for c in classes[1:]:
            out = self.product(out, c)
        return out

    def evaluate(self, *classes):
        """Integer value of a product landing in degree 0 (None if indeterminate)."""
        res = self.multiply(*classes)
        if res.degree != 0:
            raise DimensionError(f"product lands in degree {res.degree}, not 0")
        return None if res.indeterminate else res.coeffs[0]

    def pairing_matrix(self, k):
        """Matrix of H_k x H_{4-k} -> Z on canonical bases."""
        if k not in range(5):
            raise DimensionError(f"degree must be 0..4, got {k}")
        v, m = self._tables[k, 4 - k]
        if m.any():
            raise IndeterminatePairing(f"degree-{k} pairing has indeterminate entries")
        return np.array(v[:, :, 0], dtype=np.int64)

    def structure_constants(self):
        """Yield (left, right, target, value) over basis pairs; value None means indeterminate."""
        for (p, q), (v, m) in sorted(self._tables.items()):
            r = p + q - 4
            nz = np.argwhere((v != 0) | m)
            for i, j, k in nz:
                val = None if m[i, j, k] else int(v[i, j, k])
                yield self.labels[p][i], self.labels[q][j], self.labels[r][k], val

    def indeterminate_constants(self):
        return sorted((a, b, c) for a, b, c, val in self.structure_constants() if val is None)

    def full_tensor(self):
        """Ungraded (n x n x n) structure tensor over the concatenated basis, degree 0 first."""
        offsets = {}
        pos = 0
        for k in range(5):
            offsets[k] = pos
            pos += self.sizes[k]
        val = np.zeros((pos, pos, pos), dtype=np.int64)
        mask = np.zeros((pos, pos, pos), dtype=bool)
        for (p, q), (v, m) in self._tables.items():
            r = p + q - 4
            sl = (
                slice(offsets[p], offsets[p] + self.sizes[p]),
                slice(offsets[q], offsets[q] + self.sizes[q]),
                slice(offsets[r], offsets[r] + self.sizes[r]),
            )
            val[sl] = v
            mask[sl] = m
        return val, mask, offsets


def build_ring(data):
    """Assemble the multiplication table for ``data``.

    Off the Johnson kernel the [F]-coefficient of M_x.M_y (x != y) is unknown
    and masked.  On the kernel each lift is tau~(b) = C*(k_b); the ring is the
    zero-lift ring written in the basis adapted to those lifts, and the
    resulting [F]-coefficients are computed, not assumed.
    """
    base, fiber = data.base, data.fiber
    fb = fiber.rank
    e = data.e_param
    if data.johnson_kernel:
        if e not in (0, None):
            raise InconsistentData(f"Johnson kernel declared but e = {e} (must be 0)")
        try:
            k_rows = data.lift_covectors()
        except NotInImage:
            bad = next(
                base.labels[i] for i, row in enumerate(data.tau)
                if not exterior.quotient_reduce(fiber, row).is_zero
            )
            raise InconsistentData(
                f"Johnson kernel declared but tau({bad}) is nonzero in the quotient by H"
            ) from None
        zero_alpha = np.zeros((fb, fb), dtype=np.int64)
        no_mask = np.zeros((fb, fb), dtype=bool)
        zero_tau = np.zeros_like(data.tau)
        sizes, tabs0 = _assemble(base, fiber, zero_tau, zero_alpha, no_mask, 0, False)
        if not k_rows.any():
            frames = {k: np.eye(n, dtype=np.int64) for k, n in sizes.items()}
            return BundleRing(_with_e(data, 0), sizes, tabs0, frames, zero_alpha, no_mask)
        frames, inverses = _kernel_frames(base, fiber, k_rows)
        moved = _transform(tabs0, frames, inverses)
        t, _ = moved[3, 3]
        hb = base.rank
        alpha = np.array(t[hb:, hb:, 0])
        _, tabs = _assemble(base, fiber, data.tau, alpha, no_mask, 0, False)
        for key, (v, m) in tabs.items():
            mv, mm = moved[key]
            if mm.any() or not np.array_equal(v, mv):
                raise ArithmeticError(f"change of basis disagrees with the table in degrees {key}")
        return BundleRing(_with_e(data, 0), sizes, tabs, frames, alpha, no_mask)

    alpha = np.zeros((fb, fb), dtype=np.int64)
    alpha_mask = ~np.eye(fb, dtype=bool)
    e_mask = e is None
    sizes, tabs = _assemble(base, fiber, data.tau, alpha, alpha_mask, 0 if e_mask else int(e), e_mask)
    frames = {k: np.eye(n, dtype=np.int64) for k, n in sizes.items()}
    return BundleRing(data, sizes, tabs, frames, alpha, alpha_mask)


def _with_e(data, e):
    if data.e_param == e:
        return data
    return BundleData(data.base, data.fiber, data.tau, e, data.johnson_kernel)


# ------------------------------------------------------------------ checks


def quadruple_product(ring, x, y, z, w):
    """M/E quadruple product of four degree-3 classes given by label or class."""
    classes = [ring[c] if isinstance(c, str) else c for c in (x, y, z, w)]
    return ring.evaluate(*classes)


def quadruple_tensor(ring):
    """(values, mask) of ((X.Y).Z).W over all degree-3 basis quadruples."""
    v, m = masked_einsum(
        "ija,akb,blc->ijklc", ring.table(3, 3), ring.table(2, 3), ring.table(1, 3)
    )
    return v[..., 0], m[..., 0]


def expected_quadruple_shift(data, k_rows):
    """Change of every degree-3 quadruple product when tau~(b) becomes tau~(b) + C*(k_b).

    Only quadruples with exactly one E factor move; the value is the
    alternating extension of M_x.M_y.M_z.E_b -> C*(k_b)(x ^ y ^ z).
    """
    hb, fb = data.base.rank, data.fiber.rank
    n = hb + fb
    m = slice(hb, n)
    shift = np.zeros((n, n, n, n), dtype=np.int64)
    for b in range(hb):
        t = exterior.to_tensor(data.fiber, exterior.cstar(data.fiber, k_rows[b]))
        shift[m, m, m, b] = t
        shift[m, m, b, m] = -t
        shift[m, b, m, m] = t
        shift[b, m, m, m] = -t
    return shift


def lift_covariance_failures(data, k_rows, ring=None):
    """Quadruples (with at least one E factor) whose change disagrees with the C* shift.

    Products of four M classes are excluded: they are quadratic in the lift
    (through the Sigma pairing of two M.M products), so they move too.
    """
    ring = ring or build_ring(data)
    k_rows = np.asarray(k_rows, dtype=np.int64)
    shifted = data.tau + np.array([exterior.cstar(data.fiber, k) for k in k_rows])
    other = build_ring(BundleData(data.base, data.fiber, shifted, data.e_param, data.johnson_kernel))
    q1, m1 = quadruple_tensor(ring)
    q2, m2 = quadruple_tensor(other)
    hb = data.base.rank
    compared = ~(m1 | m2)
    compared[hb:, hb:, hb:, hb:] = False
    bad = compared & (q2 - q1 != expected_quadruple_shift(data, k_rows))
    return [tuple(int(v) for v in idx) for idx in np.argwhere(bad)]


def graded_commutativity_failures(ring):
    """(p, q, i, j) where both sides are determined and disagree."""
    bad = []
    for (p, q), (v, m) in ring.tables().items():
        if p > q:
            continue
        v2, m2 = ring.table(q, p)
        sign = cohomological_sign(p, q)
        other = sign * v2.transpose(1, 0, 2)
        known = ~(m | m2.transpose(1, 0, 2))
        diff = np.argwhere(known & (v != other))
        bad += [(p, q, int(i), int(j)) for i, j, _ in diff]
    return sorted(set(bad))


def associativity_failures(ring, degrees=None):
    """(p, q, r, i, j, k) with (X.Y).Z != X.(Y.Z) where both sides are determined.

    Only degree triples with p + q + r >= 8 can be nonzero.
    """
    bad = []
    triples_of_degrees = degrees or [
        (p, q, r) for p in range(5) for q in range(5) for r in range(5) if p + q + r >= 8
    ]
    for p, q, r in triples_of_degrees:
        if p + q < 4 or q + r < 4:
            continue
        left = masked_einsum("ija,akl->ijkl", ring.table(p, q), ring.table(p + q - 4, r))
        right = masked_einsum("jka,ial->ijkl", ring.table(q, r), ring.table(p, q + r - 4))
        known = ~(left[1] | right[1])
        diff = np.argwhere(known & (left[0] != right[0]))
        bad += [(p, q, r, int(i), int(j), int(k)) for i, j, k, _ in diff]
    return bad


def unimodularity_report(ring):
    """{k: det} for every degree; raises IndeterminatePairing if some pairing is masked."""
    return {k: intlinalg.det_int(ring.pairing_matrix(k)) for k in range(5)}


def c_class_solutions(ring):
    """Solutions of C.Sigma_{b,z} = 0, C.[F] = 1 over the degree-2 basis.

    Returns (particular, kernel) where kernel is a basis of the homogeneous
    solutions.  The kernel is spanned by [F], so C is pinned down only after
    also fixing C.C.
    """
    g = ring.pairing_matrix(2)
    rows = [g[0]] + [g[i] for i in range(2, ring.sizes[2])]
    rhs = [1] + [0] * (ring.sizes[2] - 2)
    particular = intlinalg.solve_int(rows, rhs)
    kernel = intlinalg.nullspace_q(np.array(rows), ncols=ring.sizes[2])
    return particular, kernel


def unique_c_class(ring):
    """The unique degree-2 class with C.Sigma = 0, C.[F] = 1, C.C = e, by direct solve."""
    g = ring.pairing_matrix(2)
    base_sol, kernel = c_class_solutions(ring)
    if base_sol is None:
        raise ArithmeticError("no class pairs to 1 with [F] and 0 with every Sigma")
    if kernel != [[1] + [0] * (ring.sizes[2] - 1)]:
        raise ArithmeticError("homogeneous solutions are not spanned by [F]")
    c0 = np.array(base_sol, dtype=np.int64)
    f = np.zeros_like(c0)
    f[0] = 1
    # (c0 + t F)^2 = c0^2 + 2t
    diff = int(ring.e_param) - int(c0 @ g @ c0)
    if diff % 2:
        raise ArithmeticError("C.C parity is inconsistent with the Sigma pairing")
    return c0 + (diff // 2) * f


def gysin_images(ring):
    """Coordinates of E_b (as columns) in degree 3 and of [F] in degree 2."""
    hb = ring.base.rank
    e_cols = np.array([ring.e_class(ring.base.basis_vector(b)).coeffs for b in range(hb)]).T
    f = np.array(ring["[F]"].coeffs)
    return e_cols, f


def forced_fiber_coefficients(data):
    """Values of the [F]-coefficients alpha_xy of M_x.M_y forced by associativity.

    Four degree-3 classes have an alternating quadruple product
    Q(x,y,z,w) = alpha_xy J(z,w) + alpha_zw J(x,y) + e J(x,y) J(z,w) + r_xy S r_zw.
    Alternation under swapping the middle pair is linear in alpha.  Returns
    the unique rational solution as an integer antisymmetric matrix, or None
    when e is unknown, the system is inconsistent, or alpha is not unique.
    """
    base, fiber = data.base, data.fiber
    if data.e_param is None:
        return None
    e = int(data.e_param)
    hb, fb = base.rank, fiber.rank
    jf = fiber.gram
    s = -np.kron(base.gram, fiber.gram)
    tens = np.stack([exterior.to_tensor(fiber, row) for row in data.tau])
    r = tens.transpose(1, 2, 0, 3).reshape(fb, fb, hb * fb)
    rsr = np.einsum("xyk,kl,zwl->xyzw", r, s, r)
    pairs = [(x, y) for x in range(fb) for y in range(x + 1, fb)]
    col = {p: n for n, p in enumerate(pairs)}

    def coef(x, y):
        if x == y:
            return None, 0
        return (col[(x, y)], 1) if x < y else (col[(y, x)], -1)

    rows, rhs = [], []
    for x in range(fb):
        for y in range(fb):
            for z in range(fb):
                for w in range(fb):
                    row = [0] * len(pairs)
                    const = 0
                    for (a, b, c, d) in ((x, y, z, w), (x, z, y, w)):
                        for (p1, p2, j) in (((a, b), (c, d), jf[c, d]), ((c, d), (a, b), jf[a, b])):
                            idx, sgn = coef(*p1)
                            if idx is not None and j:
                                row[idx] += sgn * int(j)
                        const += e * int(jf[a, b]) * int(jf[c, d]) + int(rsr[a, b, c, d])
                    if any(row) or const:
                        rows.append(row)
                        rhs.append(-const)
    if not rows:
        return None
    sol = intlinalg.solve_q(rows, rhs)
    if sol is None or intlinalg.rank_q(np.array(rows)) < len(pairs):
        return None
    if any(v.denominator != 1 for v in sol):
        return None
    alpha = np.zeros((fb, fb), dtype=np.int64)
    for (x, y), v in zip(pairs, sol):
        alpha[x, y] = int(v)
        alpha[y, x] = -int(v)
    return alpha


def bundle_phi(ring):
    """Matrix sending the bundle basis (concatenated, degree 0 first) to the tensor basis.

    The tensor basis is base_surface_basis x fiber_surface_basis with each
    surface basis ordered pt, H_1, [S] and flattened row-major.
    """
    from .surface_algebra import SurfaceAlgebra

    sb = SurfaceAlgebra(ring.base)
    sf = SurfaceAlgebra(ring.fiber)
    nb, nf = sb.size, sf.size
    jb, jf = ring.base.gram, ring.fiber.gram
    hb, fb = ring.base.rank, ring.fiber.rank
    _, _, off = ring.full_tensor()
    n = sum(ring.sizes.values())
    phi = np.zeros((nb * nf, n), dtype=np.int64)

    def t(i, j):
        return i * nf + j

    sp, sfund = sb.point, sb.fundamental
    fp, ffund = sf.point, sf.fundamental
    phi[t(sp, fp), off[0]] = 1
    for b in range(hb):
        for a in range(hb):
            phi[t(sb.h1(a), fp), off[1] + b] = jb[a, b]
    for z in range(fb):
        for w in range(fb):
            phi[t(sp, sf.h1(w)), off[1] + hb + z] = jf[w, z]
    phi[t(sp, ffund), off[2]] = 1
    phi[t(sfund, fp), off[2] + 1] = 1
    for b in range(hb):
        for z in range(fb):
            phi[t(sb.h1(b), sf.h1(z)), off[2] + 2 + b * fb + z] = -1
    for b in range(hb):
        phi[t(sb.h1(b), ffund), off[3] + b] = 1
    for z in range(fb):
        phi[t(sfund, sf.h1(z)), off[3] + hb + z] = 1
    phi[t(sfund, ffund), off[4]] = 1
    return phi


def _block_frame(ring):
    n = sum(ring.sizes.values())
    a = np.zeros((n, n), dtype=np.int64)
    pos = 0
    for k in range(5):
        s = ring.sizes[k]
        a[pos:pos + s, pos:pos + s] = ring.frames[k]
        pos += s
    return a


def product_ring_mismatches(ring):
    """Structure constants where the ring differs from H_*(Sigma_h) (x) H_*(Sigma_g)."""
    from .surface_algebra import SurfaceAlgebra, tensor_product

    if not ring.johnson_kernel:
        raise SurfBundleError("product ring comparison needs a ring built with johnson_kernel = true")
    val, mask, _ = ring.full_tensor()
    if mask.any():
        raise ArithmeticError("kernel ring has indeterminate constants")
    prod = tensor_product(SurfaceAlgebra(ring.base), SurfaceAlgebra(ring.fiber))
    phi = bundle_phi(ring) @ _block_frame(ring)
    pushed = np.einsum("ijk,ak->ija", val, phi, optimize=True)
    pulled = np.einsum("ai,bj,abc->ijc", phi, phi, prod, optimize=True)
    return np.argwhere(pushed != pulled)


def product_ring_compare(ring):
    """True iff every structure constant matches the product of the two surface rings."""
    return len(product_ring_mismatches(ring)) == 0
