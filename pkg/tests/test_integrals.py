import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uccorder.constants import BOHR_TO_ANGSTROM
from uccorder.fermion import FermionOperator
from uccorder.integrals import (
    FcidumpError,
    MolecularIntegrals,
    UnsupportedReferenceError,
    build_fermionic_hamiltonian,
    parse_fcidump,
    reference_determinant,
    rhf_energy,
    write_fcidump,
)
from uccorder.pauli import jordan_wigner
from uccorder.statevector import expectation, from_occupation

from conftest import fixture_path, manifest


def random_integrals(seed, n=3, n_electrons=2):
    r = np.random.default_rng(seed)
    h = r.normal(size=(n, n))
    h = h + h.T
    g = r.normal(size=(n, n, n, n))
    g = g + g.transpose(1, 0, 2, 3)
    g = g + g.transpose(0, 1, 3, 2)
    g = g + g.transpose(2, 3, 0, 1)
    return MolecularIntegrals(n, n_electrons, 0, float(r.normal()), h, g)


def test_empty_integrals():
    ints = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0, &END\n")
    assert ints.n_spatial == 2 and ints.n_electrons == 2
    assert ints.core_energy == 0.0
    assert not ints.h1.any() and not ints.g2.any()


def test_h2_core_energy_is_nuclear_repulsion():
    ints = parse_fcidump(fixture_path("h2", 0.7414).read_text())
    expected = 1.0 / (0.7414 / BOHR_TO_ANGSTROM)
    assert ints.core_energy == pytest.approx(expected, abs=1e-6)
    assert ints.core_energy == pytest.approx(0.713754, abs=1e-6)


def test_two_electron_record_expands_eightfold():
    ints = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0 /\n 0.5 1 2 1 2\n")
    g = ints.g2
    for idx in [(0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)]:
        assert g[idx] == 0.5
    assert np.count_nonzero(g) == 4
    assert ints.symmetry_violation() == 0.0


def test_one_electron_record_is_symmetrized():
    ints = parse_fcidump("&FCI NORB=3,NELEC=2,MS2=0,\n ORBSYM=1,1,1,\n ISYM=1,\n&END\n-1.25 3 1 0 0\n")
    assert ints.h1[2, 0] == ints.h1[0, 2] == -1.25


def test_fortran_exponents_accepted():
    ints = parse_fcidump("&FCI NORB=1,NELEC=2,MS2=0 &END\n 1.5D-01 0 0 0 0\n")
    assert ints.core_energy == pytest.approx(0.15)


@pytest.mark.parametrize(
    "text, line",
    [
        ("&FCI NELEC=2,MS2=0, &END\n", 1),
        ("&FCI NORB=2,MS2=0, &END\n", 1),
        ("&FCI NORB=2,NELEC=2 &END\n 0.1 3 1 0 0\n", 2),
        ("&FCI NORB=2,NELEC=2 &END\n\n 0.1 1 1 1 1\n abc 1 1 0 0\n", 4),
        ("&FCI NORB=2,NELEC=2 &END\n 0.1 1 1 1\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(FcidumpError) as err:
        parse_fcidump(text)
    assert err.value.line == line


def test_unrestricted_rejected():
    with pytest.raises(FcidumpError):
        parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,UHF=.TRUE. &END\n")


def test_roundtrip_zero():
    ints = MolecularIntegrals.zeros(3, 2)
    assert parse_fcidump(write_fcidump(ints)).max_abs_diff(ints) == 0.0


def test_roundtrip_h2_fixture():
    text = fixture_path("h2", 0.7414).read_text()
    ints = parse_fcidump(text)
    again = parse_fcidump(write_fcidump(ints))
    assert again.max_abs_diff(ints) < 1e-12


def test_written_order_is_canonical():
    text = fixture_path("h4", 1.0).read_text().splitlines()
    header, body = text[:4], text[4:]
    shuffled = body[:]
    random.Random(3).shuffle(shuffled)
    a = write_fcidump(parse_fcidump("\n".join(header + body)))
    b = write_fcidump(parse_fcidump("\n".join(header + shuffled)))
    assert a == b


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_roundtrip_property(seed, n):
    ints = random_integrals(seed, n)
    assert ints.symmetry_violation() < 1e-12
    assert parse_fcidump(write_fcidump(ints)).max_abs_diff(ints) < 1e-12


def test_fixture_integrals_symmetric():
    for entry in manifest()["entries"]:
        ints = parse_fcidump((fixture_path(entry["molecule"], entry["bond_length"])).read_text())
        assert ints.symmetry_violation() < 1e-12
        assert ints.n_electrons % 2 == 0 and ints.ms2 == 0


def test_constant_hamiltonian():
    ints = MolecularIntegrals.zeros(2, 2, core_energy=0.75)
    assert build_fermionic_hamiltonian(ints) == FermionOperator.constant(0.75)


def test_identity_h1_gives_number_operator():
    ints = MolecularIntegrals(2, 2, 0, 0.0, np.eye(2), np.zeros((2, 2, 2, 2)))
    number = FermionOperator({((p, True), (p, False)): 1.0 for p in range(4)})
    assert build_fermionic_hamiltonian(ints) == number


@pytest.mark.parametrize("molecule, r", [("h2", 0.7414), ("h4", 1.0)])
def test_hamiltonian_hermitian(molecule, r):
    ints = parse_fcidump(fixture_path(molecule, r).read_text())
    assert build_fermionic_hamiltonian(ints).is_hermitian()


def test_reference_determinant():
    assert reference_determinant(MolecularIntegrals.zeros(2, 2)).bits == (1, 1, 0, 0)
    occ = reference_determinant(MolecularIntegrals.zeros(6, 6))
    assert occ.bits == (1,) * 6 + (0,) * 6
    assert occ.n_alpha == occ.n_beta == 3
    with pytest.raises(UnsupportedReferenceError):
        reference_determinant(MolecularIntegrals.zeros(2, 3, ms2=1))


@pytest.mark.parametrize("seed", range(3))
def test_reference_energy_matches_slater_condon(seed):
    ints = random_integrals(seed, n=3, n_electrons=4)
    h = jordan_wigner(build_fermionic_hamiltonian(ints), ints.n_qubits)
    psi = from_occupation(reference_determinant(ints))
    assert expectation(h, psi) == pytest.approx(rhf_energy(ints), abs=1e-10)


def test_fixture_rhf_energies_match_producer():
    for entry in manifest()["entries"]:
        if entry["frozen_orbitals"]:
            continue
        ints = parse_fcidump(fixture_path(entry["molecule"], entry["bond_length"]).read_text())
        assert rhf_energy(ints) == pytest.approx(entry["rhf_energy"], abs=1e-9)
