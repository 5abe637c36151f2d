import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix

from surfbundle import bundle_ring as br
from surfbundle import exterior as ex
from surfbundle.errors import DimensionError, InconsistentData, IndeterminatePairing, SurfBundleError
from surfbundle.symplectic import SymplecticLattice


def kernel_data(g, h, k_rows=None):
    fib = SymplecticLattice(g)
    tau = None if k_rows is None else np.array([ex.cstar(fib, k) for k in k_rows])
    return br.BundleData.create(g, h, tau, johnson_kernel=True)


def random_tau(rng, g, h, lo=-2, hi=2):
    return rng.integers(lo, hi + 1, (2 * h, ex.tri_length(SymplecticLattice(g))))


def k_strategy(g, h):
    return st.lists(st.integers(-2, 2), min_size=4 * g * h, max_size=4 * g * h).map(
        lambda v: np.array(v, dtype=np.int64).reshape(2 * h, 2 * g)
    )


@pytest.mark.parametrize("g,h", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_betti_numbers(g, h):
    ring = br.build_ring(br.BundleData.create(g, h))
    assert [ring.rank(k) for k in range(5)] == [1, 2 * h + 2 * g, 2 + 4 * g * h, 2 * h + 2 * g, 1]
    assert ring.labels[2][:3] == ("[F]", "C", "Sigma_a1,x1")


def test_rank_examples():
    assert br.build_ring(br.BundleData.create(2, 2)).rank(2) == 18
    assert br.build_ring(br.BundleData.create(3, 2)).rank(3) == 10


def test_construction_errors():
    fib = SymplecticLattice(3)
    bad = np.zeros((4, 20), dtype=int)
    bad[1] = ex.dual_triple(fib, "a1", "a2", "a3")
    with pytest.raises(InconsistentData, match="tau\\(b1\\)"):
        br.build_ring(br.BundleData.create(3, 2, bad, johnson_kernel=True))
    with pytest.raises(InconsistentData):
        br.build_ring(br.BundleData.create(2, 2, johnson_kernel=True, e_param=2))
    with pytest.raises(DimensionError, match="b2"):
        br.BundleData.create(2, 2, {"a1": [0] * 4, "b1": [0] * 4, "a2": [0] * 4})
    with pytest.raises(DimensionError):
        br.BundleData.create(2, 2, np.zeros((3, 4), dtype=int))


def test_defining_products():
    ring = br.build_ring(br.BundleData.create(3, 2, random_tau(np.random.default_rng(0), 3, 2), e_param=0))
    fib, base = ring.fiber, ring.base
    for b in range(base.rank):
        for x in range(fib.rank):
            prod = ring.product(ring.m_class(fib.basis_vector(x)), ring.e_class(base.basis_vector(b)))
            assert prod == ring.sigma(base.basis_vector(b), fib.basis_vector(x))
    for z in range(fib.rank):
        for w in range(fib.rank):
            got = ring.evaluate(ring.m_class(fib.basis_vector(z)), ring.m_class(fib.basis_vector(w)), ring["[F]"])
            assert got == fib.gram[z, w]
    for a in range(base.rank):
        for b in range(base.rank):
            prod = ring.product(ring.e_class(base.basis_vector(a)), ring.e_class(base.basis_vector(b)))
            assert prod == int(base.gram[a, b]) * ring["[F]"]


@pytest.mark.parametrize("kernel", [False, True])
def test_quadruple_products_read_back_the_lift(kernel):
    rng = np.random.default_rng(5)
    fib = SymplecticLattice(3)
    if kernel:
        tau = np.array([ex.cstar(fib, k) for k in rng.integers(-2, 3, (4, 6))])
    else:
        tau = random_tau(rng, 3, 2)
    ring = br.build_ring(br.BundleData.create(3, 2, tau, johnson_kernel=kernel))
    idx = ex.triple_index(6)
    for b in range(4):
        eb = ring.e_class(ring.base.basis_vector(b))
        for (x, y, z), n in idx.items():
            m = [ring.m_class(fib.basis_vector(i)) for i in (x, y, z)]
            assert ring.evaluate(*m, eb) == tau[b, n]


def test_c_class_is_unique_once_e_is_fixed():
    ring = br.build_ring(br.BundleData.create(2, 3))
    particular, kernel = br.c_class_solutions(ring)
    assert particular is not None
    assert kernel == [[1] + [0] * (ring.rank(2) - 1)]
    assert list(br.unique_c_class(ring)) == list(ring["C"].coeffs)
    ring_e = br.build_ring(br.BundleData.create(2, 2, e_param=4))
    c = br.unique_c_class(ring_e)
    assert list(c) == list(ring_e["C"].coeffs)
    assert ring_e.evaluate(ring_e["C"], ring_e["C"]) == 4


def test_gysin_classes_are_independent():
    ring = br.build_ring(br.BundleData.create(3, 2))
    e_cols, f = br.gysin_images(ring)
    assert Matrix(e_cols.tolist()).rank() == ring.base.rank
    assert any(f)
    # [F] pairs nontrivially: injectivity of the fiber Gysin map
    assert ring.evaluate(ring["[F]"], ring["C"]) == 1


def test_off_kernel_indeterminate_set():
    rng = np.random.default_rng(11)
    for g, h in [(2, 2), (3, 2)]:
        for e in (None, 0):
            ring = br.build_ring(br.BundleData.create(g, h, random_tau(rng, g, h), e_param=e))
            fl = ring.fiber.labels
            off = [(a, b) for a in fl for b in fl if a != b]
            want = {(f"M_{a}", f"M_{b}", "[F]") for a, b in off}
            want |= {("C", f"M_{a}", f"mu_{b}") for a, b in off}
            want |= {(f"M_{a}", "C", f"mu_{b}") for a, b in off}
            if e is None:
                want.add(("C", "C", "pt"))
            assert set(ring.indeterminate_constants()) == want


def test_indeterminate_values_propagate():
    ring = br.build_ring(br.BundleData.create(2, 2, random_tau(np.random.default_rng(2), 2, 2), e_param=None))
    assert ring.evaluate(ring["M_x1"], ring["M_x2"], ring["C"]) is None
    # M_x1.M_y1 carries C, and C.C is unknown without e
    assert ring.evaluate(ring["M_x1"], ring["M_y1"], ring["C"]) is None
    assert ring.evaluate(ring["M_x1"], ring["M_x2"], ring["[F]"]) == 0
    prod = ring.product(ring["M_x1"], ring["M_x2"])
    assert ring.describe(prod)["[F]"] == "?"
    with pytest.raises(IndeterminatePairing):
        ring.pairing_matrix(2)
    with pytest.raises(IndeterminatePairing):
        br.unimodularity_report(ring)


def test_classes_from_different_rings_do_not_mix():
    r1 = br.build_ring(br.BundleData.create(2, 2))
    r2 = br.build_ring(br.BundleData.create(2, 2))
    with pytest.raises(SurfBundleError):
        r1.product(r1["E_a1"], r2["E_a1"])
    assert r1.product(r1["pt"], r1["pt"]) == r1.zero(0)


def _check_kernel_ring(ring):
    dets = br.unimodularity_report(ring)
    assert all(abs(d) == 1 for d in dets.values())
    # independent determinant check
    for k in range(5):
        assert abs(Matrix(ring.pairing_matrix(k).tolist()).det()) == 1
    assert br.graded_commutativity_failures(ring) == []
    assert br.associativity_failures(ring) == []
    assert br.product_ring_compare(ring)


@pytest.mark.parametrize("g,h", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_zero_lift_kernel_ring(g, h):
    _check_kernel_ring(br.build_ring(kernel_data(g, h)))


@settings(max_examples=30)
@given(k_strategy(2, 2))
def test_kernel_ring_with_lifts(k_rows):
    data = kernel_data(2, 2, k_rows)
    ring = br.build_ring(data)
    _check_kernel_ring(ring)
    forced = br.forced_fiber_coefficients(data)
    assert forced is not None
    assert np.array_equal(forced, ring.fiber_coefficients)


@settings(max_examples=15)
@given(k_strategy(3, 2))
def test_kernel_fiber_coefficients_match_associativity_route(k_rows):
    data = kernel_data(3, 2, k_rows)
    ring = br.build_ring(data)
    assert np.array_equal(br.forced_fiber_coefficients(data), ring.fiber_coefficients)
    assert np.array_equal(ring.fiber_coefficients, -ring.fiber_coefficients.T)


def test_off_kernel_singleton_lift_is_associative_where_determined():
    fib = SymplecticLattice(3)
    tau = np.zeros((4, 20), dtype=int)
    tau[0] = ex.dual_triple(fib, "a1", "a2", "a3")
    ring = br.build_ring(br.BundleData.create(3, 2, tau))
    assert br.graded_commutativity_failures(ring) == []
    assert br.associativity_failures(ring) == []


def test_non_kernel_ring_is_not_a_product():
    with pytest.raises(SurfBundleError):
        br.product_ring_compare(br.build_ring(br.BundleData.create(2, 2)))


@given(k_strategy(2, 2), k_strategy(2, 2))
def test_lift_covariance_on_kernel(k0, k1):
    data = kernel_data(2, 2, k0)
    assert br.lift_covariance_failures(data, k1) == []


def test_lift_covariance_off_kernel_direct():
    rng = np.random.default_rng(8)
    fib = SymplecticLattice(3)
    data = br.BundleData.create(3, 2, random_tau(rng, 3, 2))
    k = rng.integers(-2, 3, (4, 6))
    r1 = br.build_ring(data)
    moved = br.BundleData.create(3, 2, data.tau + np.array([ex.cstar(fib, row) for row in k]))
    r2 = br.build_ring(moved)
    for b in range(4):
        shift = ex.cstar(fib, k[b])
        for (x, y, z), n in ex.triple_index(6).items():
            args = [fib.basis_vector(i) for i in (x, y, z)]
            v1 = r1.evaluate(*[r1.m_class(a) for a in args], r1.e_class(r1.base.basis_vector(b)))
            v2 = r2.evaluate(*[r2.m_class(a) for a in args], r2.e_class(r2.base.basis_vector(b)))
            assert v2 - v1 == shift[n]
    assert br.lift_covariance_failures(data, k, ring=r1) == []


def test_structure_constants_listing():
    ring = br.build_ring(kernel_data(2, 2))
    consts = list(ring.structure_constants())
    assert ("E_a1", "E_b1", "[F]", 1) in consts
    assert ("M_x1", "E_a1", "Sigma_a1,x1", 1) in consts
    assert ("E_a1", "M_x1", "Sigma_a1,x1", -1) in consts
    assert all(v is not None for *_, v in consts)
    # without the kernel declaration alpha stays unknown even for a zero lift
    assert br.build_ring(br.BundleData.create(2, 2)).indeterminate_constants()


def test_kernel_table_rows():
    ring = br.build_ring(kernel_data(2, 2))
    assert ring.product(ring["M_x1"], ring["M_y1"]) == ring["C"]
    assert ring.product(ring["M_x1"], ring["M_x2"]) == ring.zero(2)
    assert ring.product(ring["C"], ring["[F]"]) == ring["pt"]
    assert ring.product(ring["C"], ring["C"]) == ring.zero(0)
    assert ring.product(ring["[F]"], ring["[F]"]) == ring.zero(0)


def test_lifted_kernel_ring_moves_fiber_coefficients():
    # a nonzero lift changes M_x.M_y by an [F] multiple, read from the frames
    fib = SymplecticLattice(2)
    k = np.zeros((4, 4), dtype=int)
    k[0, 0] = 1
    data = kernel_data(2, 2, k)
    ring = br.build_ring(data)
    alpha = ring.fiber_coefficients
    assert np.array_equal(alpha, br.forced_fiber_coefficients(data))
    for x in range(4):
        for y in range(4):
            prod = ring.product(ring.m_class(fib.basis_vector(x)), ring.m_class(fib.basis_vector(y)))
            assert prod.coeffs[0] == alpha[x, y]
            assert prod.coeffs[1] == fib.gram[x, y]
