import numpy as np
import pytest
from hypothesis import given, strategies as st

from uccorder.ansatz import kupccgsd_pool, uccsd_pool
from uccorder.fermion import FermionOperator, single_generator
from uccorder.pauli import (
    PauliError,
    PauliString,
    PauliSum,
    commutator,
    jordan_wigner,
    pauli_product,
    strings_commute,
    sums_commute,
)

from test_fermion import operator as fermion_operator

N = 4
masks = st.integers(0, 2**N - 1)
pauli_string = st.builds(lambda x, z: PauliString(N, x, z), masks, masks)


def P(label, n=N, c=1.0):
    return PauliString.from_label(label, n, c)


def test_number_operator():
    op = FermionOperator.ladder((0, True), (0, False))
    expected = PauliSum.from_strings([P("", 1, 0.5), P("Z0", 1, -0.5)])
    assert jordan_wigner(op, 1) == expected


def test_creation_on_three_qubits():
    got = jordan_wigner(FermionOperator.ladder((2, True)), 3)
    expected = PauliSum.from_strings([P("Z0 Z1 X2", 3, 0.5), P("Z0 Z1 Y2", 3, -0.5j)])
    assert got == expected


def test_single_generator_image():
    g = single_generator(0, 1 * 2)
    pauli = jordan_wigner(g.fermionic, 3)
    expected = PauliSum.from_strings([P("Y0 Z1 X2", 3, 0.5j), P("X0 Z1 Y2", 3, -0.5j)])
    assert pauli == expected
    np.testing.assert_allclose(pauli.to_matrix(), g.fermionic.to_matrix(3), atol=1e-12)


def test_adjacent_single_matches_dense():
    op = FermionOperator.ladder((1, True), (0, False)) - FermionOperator.ladder((0, True), (1, False))
    pauli = jordan_wigner(op, 2)
    expected = PauliSum.from_strings([P("Y0 X1", 2, 0.5j), P("X0 Y1", 2, -0.5j)])
    assert pauli == expected
    np.testing.assert_allclose(pauli.to_matrix(), op.to_matrix(2), atol=1e-12)


def test_out_of_range_index():
    with pytest.raises(PauliError):
        jordan_wigner(FermionOperator.ladder((3, True)), 3)


def test_product_examples():
    assert pauli_product(P("X0", 1), P("Z0", 1)) == P("Y0", 1, -1j)
    p = P("X0 Y1 Z3", c=0.5 - 0.25j)
    sq = pauli_product(p, p)
    assert sq.key == (0, 0)
    assert sq.coefficient == pytest.approx((0.5 - 0.25j) ** 2)


@given(pauli_string, pauli_string)
def test_product_matches_dense(a, b):
    np.testing.assert_allclose(pauli_product(a, b).to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-12)


@given(pauli_string, pauli_string, pauli_string)
def test_product_associative(a, b, c):
    lhs = pauli_product(pauli_product(a, b), c)
    rhs = pauli_product(a, pauli_product(b, c))
    assert lhs.key == rhs.key and lhs.coefficient == pytest.approx(rhs.coefficient)


@given(pauli_string, pauli_string)
def test_commutation_matches_dense(a, b):
    am, bm = a.to_matrix(), b.to_matrix()
    assert strings_commute(a, b) == np.allclose(am @ bm, bm @ am)


def test_commutation_examples():
    assert strings_commute(P("X0 Y1"), P("Y0 X1"))
    assert not strings_commute(P("X0"), P("Z0"))
    assert strings_commute(P("X0 Z2 Y3"), P("X0 Z2 Y3"))
    with pytest.raises(PauliError):
        strings_commute(P("X0", 1), P("X0", 2))


def test_sums_commute_examples():
    g1 = jordan_wigner(single_generator(0, 2).fermionic, 6)
    g2 = jordan_wigner(single_generator(1, 3).fermionic, 6)
    # spin-alpha and spin-beta singles act on interleaved qubits but still commute
    assert sums_commute(g1, g2)
    disjoint_a = PauliSum.from_strings([P("X0 Y1", 6, 1j)])
    disjoint_b = PauliSum.from_strings([P("Z4 X5", 6, 0.3j)])
    assert sums_commute(disjoint_a, disjoint_b)
    a = jordan_wigner(single_generator(0, 2).fermionic, 4)
    b = jordan_wigner(FermionOperator.ladder((3, True), (1, False)) - FermionOperator.ladder((1, True), (3, False)), 4)
    assert sums_commute(a, a)
    g02 = jordan_wigner((FermionOperator.ladder((2, True), (0, False)) - FermionOperator.ladder((0, True), (2, False))), 4)
    g03 = jordan_wigner((FermionOperator.ladder((3, True), (0, False)) - FermionOperator.ladder((0, True), (3, False))), 4)
    assert not sums_commute(g02, g03)
    comm = commutator(g02, g03).to_matrix()
    dense = g02.to_matrix() @ g03.to_matrix() - g03.to_matrix() @ g02.to_matrix()
    np.testing.assert_allclose(comm, dense, atol=1e-12)
    assert np.abs(dense).max() > 0.1
    assert sums_commute(b, b)


@given(fermion_operator, fermion_operator)
def test_jw_is_an_algebra_homomorphism(a, b):
    lhs = jordan_wigner((a * b).normal_order(), 4)
    rhs = jordan_wigner(a, 4) * jordan_wigner(b, 4)
    assert lhs.allclose(rhs, 1e-12)


@pytest.mark.parametrize(
    "pool", [uccsd_pool(2, 1, 1), uccsd_pool(3, 1, 1), kupccgsd_pool(2, 1), kupccgsd_pool(3, 1)], ids=repr
)
def test_pool_images(pool):
    for g in pool.generators:
        assert g.pauli.is_anti_hermitian()
        if pool.n_qubits <= 6:
            np.testing.assert_allclose(g.pauli.to_matrix(), g.fermionic.to_matrix(pool.n_qubits), atol=1e-12)


@pytest.mark.parametrize("pool", [uccsd_pool(4, 2, 2), kupccgsd_pool(4, 1)], ids=["uccsd", "kup"])
def test_terms_within_generator_commute(pool):
    for g in pool.generators:
        strings = list(g.pauli)
        assert all(strings_commute(a, b) for a in strings for b in strings)


@given(pauli_string.map(lambda s: PauliString(s.n_qubits, s.x_mask, s.z_mask, 0.25 - 1.5j)))
def test_text_roundtrip(s):
    assert PauliString.parse(str(s), N) == s


def test_sum_text_roundtrip():
    h = jordan_wigner(single_generator(0, 2).fermionic, 4) + PauliSum.identity(4, 0.5)
    assert PauliSum.parse(str(h), 4) == h
    assert "(0.5+0j)" in str(h)
