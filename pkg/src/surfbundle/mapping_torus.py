"""Intersection algebra of H_2 of a Torelli mapping torus.

H_2 is spanned by the fiber [F] and the tube classes Sigma_z, z in H.  The
triple intersection of three H_2 classes of a closed 3-manifold is the cup
product of their Poincare duals, which are degree-1 classes, so the form is
alternating (not symmetric) in its three arguments.
"""

from dataclasses import dataclass, field

import numpy as np

from . import exterior
from .errors import DimensionError, NotEquivalent, NotInImage
from .symplectic import SymplecticLattice

# Sign of [F] . Sigma_x . Sigma_y relative to i(x, y).
FIBER_SIGMA_SIGN = 1


@dataclass(frozen=True)
class H2Class:
    f_coeff: int
    sigma: np.ndarray = field(compare=False)

    def __eq__(self, other):
        return (
            isinstance(other, H2Class)
            and self.f_coeff == other.f_coeff
            and np.array_equal(self.sigma, other.sigma)
        )

    def __hash__(self):
        return hash((self.f_coeff, tuple(int(v) for v in self.sigma)))

    def as_array(self):
        return np.concatenate([[self.f_coeff], self.sigma]).astype(np.int64)

    @classmethod
    def fiber(cls, lattice):
        return cls(1, np.zeros(lattice.rank, dtype=np.int64))

    @classmethod
    def tube(cls, lattice, z):
        return cls(0, lattice.check_vector(z))


@dataclass(frozen=True)
class TorusModel:
    lattice: SymplecticLattice
    tau_lift: np.ndarray = field(compare=False)

    def __post_init__(self):
        tau = exterior.check_tri(self.lattice, self.tau_lift, what="tau lift")
        object.__setattr__(self, "tau_lift", tau)

    @classmethod
    def zero(cls, lattice):
        return cls(lattice, np.zeros(exterior.tri_length(lattice), dtype=np.int64))


def _as_class(m, u):
    if isinstance(u, H2Class):
        arr = u.as_array()
    else:
        arr = np.asarray(u, dtype=np.int64)
    if arr.shape != (m.lattice.rank + 1,):
        raise DimensionError(f"H_2 class must have {m.lattice.rank + 1} coordinates")
    return arr


def intersection_tensor(m):
    """Dense (2g+1)^3 array; index 0 is [F], index 1 + i is Sigma_{e_i}."""
    n = m.lattice.rank
    j = FIBER_SIGMA_SIGN * m.lattice.gram
    t = np.zeros((n + 1, n + 1, n + 1), dtype=np.int64)
    t[1:, 1:, 1:] = exterior.to_tensor(m.lattice, m.tau_lift)
    # one [F] factor in each of the three slots, alternating
    t[0, 1:, 1:] = j
    t[1:, 0, 1:] = -j
    t[1:, 1:, 0] = j
    return t


def triple_product(m, u, v, w):
    """Alternating trilinear extension of the three defining rules."""
    a, b, c = (_as_class(m, x) for x in (u, v, w))
    g = m.lattice.gram
    tau_part = exterior.evaluate(m.tau_lift, exterior.wedge3(a[1:], b[1:], c[1:]))
    fiber_part = (
        a[0] * int(b[1:] @ g @ c[1:])
        + b[0] * int(c[1:] @ g @ a[1:])
        + c[0] * int(a[1:] @ g @ b[1:])
    )
    return int(tau_part + FIBER_SIGMA_SIGN * fiber_part)


def corrected_family(m, alpha):
    """The classes Sigma_x = Sigma'_x - alpha(x)[F] for the basis vectors x."""
    alpha = m.lattice.check_vector(alpha)
    return [H2Class(-int(alpha[i]), m.lattice.basis_vector(i)) for i in range(m.lattice.rank)]


def recalibrate(m, tau_prime, tau_tilde):
    """Covector alpha with tau' - tau~ = C*(alpha).

    ``m`` supplies the lattice; the check re-evaluates the corrected family
    inside the model with lift tau'.  Raises NotEquivalent if the two lifts
    differ by something outside im C*.
    """
    lat = m.lattice
    tau_prime = exterior.check_tri(lat, tau_prime, what="tau'")
    tau_tilde = exterior.check_tri(lat, tau_tilde, what="tau~")
    try:
        alpha = exterior.solve_cstar(lat, tau_prime - tau_tilde)
    except NotInImage as exc:
        raise NotEquivalent("the two lifts do not define the same Johnson class") from exc

    model = TorusModel(lat, tau_prime)
    fam = corrected_family(model, alpha)
    for idx, (i, j, k) in enumerate(exterior.triples(lat.rank)):
        got = triple_product(model, fam[i], fam[j], fam[k])
        if got != int(tau_tilde[idx]):
            raise ArithmeticError(f"recalibration check failed on triple {(i, j, k)}")
    return alpha
