"""Second fiberings, the class of the second fiber, and uniqueness verdicts.

A second fibering p_2 : E -> B_2 enters only through homological data: the
projections P : H_1 B_2 -> H_1 B_1 and Q : H_1 B_2 -> H_1 F_1 of the degree-3
classes pulled back from B_2, and d = [F_1].[F_2].
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from . import exterior, intlinalg, symplectic
from .bundle_ring import BASE_PREFIX, FIBER_PREFIX, BundleData, build_ring, product_ring_compare
from .errors import (
    DimensionError,
    InconsistentData,
    IndeterminateContribution,
    PrimitivityViolation,
)
from .symplectic import SymplecticLattice

UNIQUE_BY_COINVARIANTS = "UniqueByCoinvariants"
KERNEL_RIGIDITY = "KernelRigidity"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SecondFiberingData:
    base2: SymplecticLattice
    P: np.ndarray = field(compare=False)
    Q: np.ndarray = field(compare=False)
    d: Optional[int] = None

    def __post_init__(self):
        p = np.asarray(self.P, dtype=np.int64)
        q = np.asarray(self.Q, dtype=np.int64)
        n = self.base2.rank
        if p.ndim != 2 or p.shape[1] != n or p.shape[0] % 2:
            raise DimensionError(f"P must be (2h x {n}), got shape {p.shape}")
        if q.ndim != 2 or q.shape[1] != n or q.shape[0] % 2:
            raise DimensionError(f"Q must be (2g x {n}), got shape {q.shape}")
        if self.d is not None and self.d < 0:
            raise InconsistentData(f"d = {self.d} is negative; the fiber intersection is never negative")
        object.__setattr__(self, "P", p)
        object.__setattr__(self, "Q", q)

    @classmethod
    def create(cls, genus_base2, P, Q, d=None):
        return cls(SymplecticLattice(genus_base2, ("c", "d")), P, Q, d)

    @cached_property
    def fiber(self):
        return SymplecticLattice(self.Q.shape[0] // 2, FIBER_PREFIX)

    @cached_property
    def base1(self):
        return SymplecticLattice(self.P.shape[0] // 2, BASE_PREFIX)

    @property
    def measured_d(self):
        """i_F(Q x_1, Q y_1), the scale of Q on the first basis pair of B_2."""
        return int(self.Q[:, 0] @ self.fiber.gram @ self.Q[:, 1])

    @property
    def scale(self):
        measured = self.measured_d
        if self.d is not None and self.d != measured:
            raise InconsistentData(f"declared d = {self.d} but i_F(Qx1, Qy1) = {measured}")
        return measured if self.d is None else self.d


def check_Q_scaled_symplectic(fd):
    """True iff Q^T J_F Q = d J_{B_2}."""
    lhs = fd.Q.T @ fd.fiber.gram @ fd.Q
    d = fd.d if fd.d is not None else fd.measured_d
    return bool(np.array_equal(lhs, d * fd.base2.gram))


def _require_nondegenerate(fd):
    if not check_Q_scaled_symplectic(fd):
        raise InconsistentData("Q is not symplectic up to the scale d")
    if fd.scale == 0:
        raise InconsistentData("d = 0: the image of Q is not a symplectic subspace")


def select_complement_pair(fd, z):
    """(x, y) in H_1 B_2 with i_F(Qx, z) = i_F(Qy, z) = 0 and i_B2(x, y) = 1.

    Standard pairs (x_i, y_i) are tried first in index order; otherwise a
    pair is built inside the symplectic complement of a primitive vector
    spanning the annihilator direction.
    """
    _require_nondegenerate(fd)
    lat = fd.base2
    z = fd.fiber.check_vector(z)
    phi = fd.Q.T @ fd.fiber.gram @ z
    for i in range(lat.genus):
        if phi[2 * i] == 0 and phi[2 * i + 1] == 0:
            return lat.basis_vector(2 * i), lat.basis_vector(2 * i + 1)

    # ker(phi) = p^perp where i_B2(v, p) = phi(v)
    p0 = np.array(intlinalg.primitive((-lat.gram @ phi).tolist()), dtype=np.int64)
    row = (p0 @ lat.gram).tolist()
    q = np.array(intlinalg.bezout_vector(row), dtype=np.int64)
    if symplectic.pairing(lat, p0, q) != 1:
        raise ArithmeticError("failed to complete a primitive vector to a hyperbolic pair")

    def project(v):
        return v - symplectic.pairing(lat, v, q) * p0 + symplectic.pairing(lat, v, p0) * q

    images = [project(v) for v in lat.basis()]
    basis, _ = intlinalg.hnf_rows(np.array(images))
    basis = np.array(basis, dtype=np.int64)
    x = basis[0]
    pair_row = [symplectic.pairing(lat, x, v) for v in basis]
    coeffs = np.array(intlinalg.bezout_vector(pair_row), dtype=np.int64)
    y = coeffs @ basis
    if symplectic.pairing(lat, x, y) != 1:
        raise ArithmeticError("complement of a hyperbolic pair is not unimodular")
    return x, y


def _pair_terms(fd, ring, b, z, x, y):
    fib, bas = ring.fiber, ring.base
    px, py = fd.P @ x, fd.P @ y
    qx, qy = fd.Q @ x, fd.Q @ y
    tau_b = ring.data.tau_of(b)
    return (
        symplectic.pairing(bas, px, b) * symplectic.pairing(fib, qy, z)
        - symplectic.pairing(bas, py, b) * symplectic.pairing(fib, qx, z)
        + exterior.evaluate(tau_b, exterior.wedge3(qx, qy, z))
    )


def _check_compatible(fd, ring):
    if fd.fiber.genus != ring.fiber.genus or fd.base1.genus != ring.base.genus:
        raise DimensionError(
            f"second fibering data is for (g, h) = ({fd.fiber.genus}, {fd.base1.genus}), "
            f"ring is ({ring.fiber.genus}, {ring.base.genus})"
        )


def fiber_sigma_pairing(fd, ring, b, z, pair=None):
    """[F_2] . Sigma_{b,z} = i(Px,b) i(Qy,z) - i(Py,b) i(Qx,z) + tau~(b)(Qx ^ Qy ^ z).

    ``pair`` is any (x, y) with i_B2(x, y) = 1; by default the complement
    pair for z, which kills the first two terms.
    """
    _check_compatible(fd, ring)
    b = ring.base.check_vector(b)
    z = ring.fiber.check_vector(z)
    if pair is None:
        x, y = select_complement_pair(fd, z)
    else:
        x, y = (fd.base2.check_vector(v) for v in pair)
        if symplectic.pairing(fd.base2, x, y) != 1:
            raise InconsistentData("pair must satisfy i_B2(x, y) = 1")
    return _pair_terms(fd, ring, b, z, x, y)


def pulled_back_class(fd, ring, v):
    """Degree-3 class E_{Pv} + M_{Qv} carried by p_2^!(v)."""
    v = fd.base2.check_vector(v)
    return ring.e_class(fd.P @ v) + ring.m_class(fd.Q @ v)


def delta_value(fd, ring, pair=None):
    """delta = i_B1(Px, Py) + Qx.Qy.C, evaluated as (p_2^! x).(p_2^! y).C in the ring."""
    lat = fd.base2
    x, y = pair if pair is not None else (lat.basis_vector(0), lat.basis_vector(1))
    if symplectic.pairing(lat, x, y) != 1:
        raise InconsistentData("pair must satisfy i_B2(x, y) = 1")
    val = ring.evaluate(pulled_back_class(fd, ring, x), pulled_back_class(fd, ring, y), ring["C"])
    if val is None:
        raise IndeterminateContribution("Qx.Qy.C is not determined off the Johnson kernel")
    return val


def second_fiber_class(fd, ring):
    """[F_2] = (delta - d e)[F] + d C + sum_{b,z} s_{b,z} Sigma_{b,z}, with s = S f.

    f_{b,z} = [F_2].Sigma_{b,z} from fiber_sigma_pairing; S is the (self
    inverse) Gram matrix of the Sigma block.  Raises PrimitivityViolation
    when the coefficients have a common factor.
    """
    _check_compatible(fd, ring)
    _require_nondegenerate(fd)
    if ring.e_param is None:
        raise IndeterminateContribution("e = C.C is unknown")
    d = fd.scale
    delta = delta_value(fd, ring)
    hb, fb = ring.base.rank, ring.fiber.rank
    f = np.array(
        [
            fiber_sigma_pairing(fd, ring, ring.base.basis_vector(b), ring.fiber.basis_vector(z))
            for b in range(hb)
            for z in range(fb)
        ],
        dtype=np.int64,
    )
    s = -np.kron(ring.base.gram, ring.fiber.gram)
    coeffs = np.concatenate([[delta - d * int(ring.e_param), d], s @ f])
    cls = ring.element(2, coeffs)
    g = intlinalg.vector_gcd(cls.coeffs)
    if g != 1:
        raise PrimitivityViolation(
            f"[F2] has coefficient gcd {g}; a fiber class must be primitive (forces d = 1)",
            coeffs=cls.coeffs,
        )
    return cls


def second_fiber_product(fd, ring, pair=None):
    """[F_2] as the product (p_2^! x).(p_2^! y) for a pair with i_B2(x, y) = 1."""
    lat = fd.base2
    x, y = pair if pair is not None else (lat.basis_vector(0), lat.basis_vector(1))
    return ring.product(pulled_back_class(fd, ring, x), pulled_back_class(fd, ring, y))


# ------------------------------------------------------------------ verdicts


@dataclass(frozen=True)
class MonodromyData:
    """Monodromy per base generator, in base-label order a1, b1, ..."""

    fiber: SymplecticLattice
    genus_base: int
    matrices: tuple
    taus: tuple
    kernel_declared: bool = False
    e_param: Optional[int] = 0

    @classmethod
    def create(cls, genus_fiber, genus_base, matrices, taus=None, kernel_declared=False, e_param=0):
        fiber = SymplecticLattice(genus_fiber, FIBER_PREFIX)
        mats = tuple(np.asarray(m, dtype=np.int64) for m in matrices)
        if taus is None:
            taus = (None,) * len(mats)
        taus = tuple(None if t is None else np.asarray(t, dtype=np.int64) for t in taus)
        return cls(fiber, genus_base, mats, taus, kernel_declared, e_param)

    @property
    def labels(self):
        return SymplecticLattice(self.genus_base, BASE_PREFIX).labels

    @property
    def is_torelli(self):
        return all(symplectic.is_torelli(m) for m in self.matrices)

    def check(self):
        for lab, m in zip(self.labels, self.matrices):
            symplectic.check_symplectic(self.fiber, m, name=f"monodromy of {lab}")

    def taus_complete(self):
        return all(t is not None for t in self.taus)

    def kernel_verified(self):
        return (
            self.is_torelli
            and self.taus_complete()
            and all(exterior.quotient_reduce(self.fiber, t).is_zero for t in self.taus)
        )

    def surface_relation_holds(self):
        """Product of commutators [M_a_i, M_b_i] is the identity."""
        n = self.fiber.rank
        acc = np.eye(n, dtype=object)
        mats = [np.array(m, dtype=object) for m in self.matrices]
        for i in range(0, len(mats), 2):
            a, b = mats[i], mats[i + 1]
            ai = np.array(intlinalg.inverse_unimodular(a), dtype=object)
            bi = np.array(intlinalg.inverse_unimodular(b), dtype=object)
            acc = acc.dot(a).dot(b).dot(ai).dot(bi)
        return bool((acc == np.eye(n, dtype=object)).all())

    def bundle_data(self, johnson_kernel=None):
        if not self.is_torelli:
            raise InconsistentData("the bundle ring needs Torelli (identity) monodromy")
        if not self.taus_complete():
            missing = next(lab for lab, t in zip(self.labels, self.taus) if t is None)
            raise DimensionError(f"tau table incomplete: no lift for generator {missing}")
        kernel = self.kernel_declared if johnson_kernel is None else johnson_kernel
        return BundleData.create(
            self.fiber.genus, self.genus_base, np.array(self.taus), self.e_param, kernel
        )


@dataclass(frozen=True)
class Constraint:
    name: str
    value: object
    source: str
    status: str = "holds"

    def as_dict(self):
        return {"name": self.name, "value": self.value, "source": self.source, "status": self.status}


@dataclass(frozen=True)
class Verdict:
    tag: str
    report: tuple

    @property
    def violated(self):
        return [c for c in self.report if c.status == "violated"]

    def as_dict(self):
        return {"tag": self.tag, "report": [c.as_dict() for c in self.report]}


def _validate_declared_kernel(mono):
    if not mono.is_torelli:
        raise InconsistentData("Johnson kernel declared but some monodromy matrix is not the identity")
    if not mono.taus_complete():
        missing = next(lab for lab, t in zip(mono.labels, mono.taus) if t is None)
        raise InconsistentData(f"Johnson kernel declared but generator {missing} has no tau lift")
    for lab, t in zip(mono.labels, mono.taus):
        if not exterior.quotient_reduce(mono.fiber, t).is_zero:
            raise InconsistentData(f"Johnson kernel declared but tau({lab}) is nonzero in the quotient by H")
    if mono.e_param not in (0, None):
        raise InconsistentData(f"Johnson kernel declared but e = {mono.e_param}")


def uniqueness_verdict(mono, fd=None):
    """Classify which uniqueness argument applies.

    Conclusions are conditional: homological input cannot certify that the
    bundle is nontrivial, only what any second fibering would have to satisfy.
    """
    mono.check()
    if mono.kernel_declared:
        _validate_declared_kernel(mono)
    lat = mono.fiber
    mats = list(mono.matrices)
    co = symplectic.coinvariants_rank(lat, mats)
    inv = len(symplectic.invariants(lat, mats))
    if co != inv:
        raise ArithmeticError(f"coinvariant rank {co} differs from invariant rank {inv}")
    report = [
        Constraint("coinvariants_rank", co, "coinvariants_rank"),
        Constraint("invariants_rank", inv, "invariants"),
        Constraint("surface_relation", mono.surface_relation_holds(), "MonodromyData.surface_relation_holds"),
    ]
    if co == 0:
        report.append(Constraint("fibering", "unique", "coinvariants_rank"))
        return Verdict(UNIQUE_BY_COINVARIANTS, tuple(report))

    kernel = mono.kernel_declared or mono.kernel_verified()
    if not kernel:
        report.append(Constraint("torelli", mono.is_torelli, "is_torelli"))
        if mono.is_torelli and mono.taus_complete():
            nonzero = [
                lab for lab, t in zip(mono.labels, mono.taus)
                if not exterior.quotient_reduce(lat, t).is_zero
            ]
            report.append(Constraint("tau_nonzero_in_quotient", nonzero, "quotient_reduce"))
        return Verdict(INCONCLUSIVE, tuple(report))

    source = "declared" if mono.kernel_declared else "quotient_reduce"
    report.append(Constraint("johnson_kernel", True, source))
    g = lat.genus
    if fd is None:
        report += [
            Constraint("d", 1, "second_fiber_class"),
            Constraint("P", "zero", "fiber_sigma_pairing"),
            Constraint("delta", 0, "delta_value"),
            Constraint("F2", "C", "second_fiber_class"),
            Constraint("genus_base2", g, "check_Q_scaled_symplectic"),
            Constraint("product", "E = B1 x B2 if a second fibering exists", "product_ring_compare"),
        ]
        return Verdict(KERNEL_RIGIDITY, tuple(report))

    # P and Q are read in the splitting of the canonical (zero) lift
    ring = build_ring(BundleData.create(g, mono.genus_base, None, 0, True))
    report.append(Constraint("lift", "canonical zero lift", "build_ring"))
    qs = check_Q_scaled_symplectic(fd)
    report.append(Constraint("Q_scaled_symplectic", qs, "check_Q_scaled_symplectic", "holds" if qs else "violated"))
    p_zero = not fd.P.any()
    report.append(Constraint("P", "zero" if p_zero else fd.P.tolist(), "fiber_sigma_pairing",
                             "holds" if p_zero else "violated"))
    genus_ok = fd.base2.genus == g
    report.append(Constraint("genus_base2", fd.base2.genus, "check_Q_scaled_symplectic",
                             "holds" if genus_ok else "violated"))
    cls = second_fiber_class(fd, ring)
    desc = ring.describe(cls)
    d = fd.scale
    report.append(Constraint("d", d, "second_fiber_class", "holds" if d == 1 else "violated"))
    report.append(Constraint("delta", delta_value(fd, ring), "delta_value"))
    report.append(Constraint("F2", desc, "second_fiber_class", "holds" if desc == {"C": 1} else "violated"))
    same = product_ring_compare(ring)
    report.append(Constraint("product_ring", same, "product_ring_compare", "holds" if same else "violated"))
    return Verdict(KERNEL_RIGIDITY, tuple(report))
