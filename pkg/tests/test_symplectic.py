import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from surfbundle import symplectic as sp
from surfbundle.errors import DimensionError, GenusError, NonSymplecticError

G2 = sp.SymplecticLattice(2)


def vectors(rank, lo=-4, hi=4):
    return st.lists(st.integers(lo, hi), min_size=rank, max_size=rank).map(np.array)


def test_basis_pairings():
    assert sp.pairing(G2, G2.basis_vector("a1"), G2.basis_vector("b1")) == 1
    assert sp.pairing(G2, G2.basis_vector("a1"), G2.basis_vector("a2")) == 0
    assert sp.pairing(G2, G2.basis_vector("b1"), G2.basis_vector("a1")) == -1


def test_labels_and_partner():
    assert sp.SymplecticLattice(3).labels == ("a1", "b1", "a2", "b2", "a3", "b3")
    assert [G2.partner(i) for i in range(4)] == [1, 0, 3, 2]
    for i in range(4):
        row = [sp.pairing(G2, G2.dual_vector(i), G2.basis_vector(j)) for j in range(4)]
        assert row == [int(i == j) for j in range(4)]


@pytest.mark.parametrize("genus", [0, 1, -3, 2.0, True])
def test_bad_genus(genus):
    with pytest.raises(GenusError):
        sp.SymplecticLattice(genus)


def test_dimension_checks():
    with pytest.raises(DimensionError):
        sp.pairing(G2, [1, 0, 0], [0, 1, 0, 0])
    with pytest.raises(DimensionError):
        G2.index("c1")


def test_zero_twist_is_identity():
    assert np.array_equal(sp.transvection(G2, np.zeros(4, dtype=int)), np.eye(4))


def test_invariants_examples():
    assert len(sp.invariants(G2, [np.eye(4, dtype=int)])) == 4
    t = sp.transvection(G2, G2.basis_vector("a1"))
    inv = np.array(sp.invariants(G2, [t]))
    assert inv.shape == (3, 4)
    # span{a1, a2, b2}: b1 coordinate vanishes
    assert np.all(inv[:, 1] == 0)
    four = [sp.transvection(G2, G2.basis_vector(i)) for i in range(4)]
    assert sp.invariants(G2, four) == []


def test_coinvariant_examples():
    assert sp.coinvariants_rank(G2, [np.eye(4, dtype=int)]) == 4
    assert sp.coinvariants_rank(G2, [sp.transvection(G2, G2.basis_vector("a1"))]) == 3
    four = [sp.transvection(G2, G2.basis_vector(i)) for i in range(4)]
    assert sp.coinvariants_rank(G2, four) == 0
    assert sp.coinvariants_divisors(G2, four) == (0, [])


def test_coinvariant_torsion_from_scaled_twist():
    t = sp.transvection(G2, 2 * G2.basis_vector("a1"))
    # image of M - I is span{4 a1}
    assert sp.coinvariants_rank(G2, [t]) == 3
    assert sp.coinvariants_divisors(G2, [t]) == (3, [4])


def test_non_symplectic_witness():
    m = np.eye(4, dtype=int)
    m[0, 0] = 2
    with pytest.raises(NonSymplecticError) as info:
        sp.check_symplectic(G2, m)
    i, j, got, want = info.value.witness
    lhs = m.T @ G2.gram @ m
    assert lhs[i, j] == got and G2.gram[i, j] == want and got != want
    with pytest.raises(NonSymplecticError):
        sp.invariants(G2, [m])


@given(st.sampled_from([2, 3, 4]).flatmap(lambda g: st.tuples(st.just(g), vectors(2 * g), vectors(2 * g), vectors(2 * g))))
def test_transvection_properties(args):
    g, c, x, y = args
    lat = sp.SymplecticLattice(g)
    m = sp.transvection(lat, c)
    assert sp.is_symplectic(lat, m)
    assert np.array_equal(m @ x, x + sp.pairing(lat, x, c) * c)
    assert sp.pairing(lat, m @ x, m @ y) == sp.pairing(lat, x, y)
    assert np.array_equal(m @ sp.inverse_transvection(lat, c), np.eye(lat.rank))
    assert sp.pairing(lat, x, y) == -sp.pairing(lat, y, x)


@given(st.lists(vectors(4, -2, 2), min_size=1, max_size=4))
def test_invariants_and_coinvariants_have_equal_rank(cs):
    mats = [sp.transvection(G2, c) for c in cs]
    inv = sp.invariants(G2, mats)
    for v in inv:
        for m in mats:
            assert np.array_equal(m @ v, v)
    # symplectic duality: dim fixed space = dim coinvariants
    assert len(inv) == sp.coinvariants_rank(G2, mats)
