from itertools import permutations

import numpy as np
import pytest

from uccorder.fci import (
    SectorBasis,
    dissociation_reference,
    fci_ground_energy,
    sector_basis,
    sector_matrix,
)
from uccorder.pauli import PauliString, PauliSum
from uccorder.statevector import ContractError, apply_hamiltonian

from conftest import manifest, problem_for


def full_space_sector_minimum(h, n_alpha, n_beta):
    # oracle: diagonalize the whole 2^n matrix, keep eigenvectors living in the sector
    n = h.n_qubits
    w, u = np.linalg.eigh(h.to_matrix())
    idx = np.arange(1 << n)
    na = np.array([bin(i & int("01" * (n // 2), 2)).count("1") for i in idx])
    nb = np.array([bin(i & int("10" * (n // 2), 2)).count("1") for i in idx])
    inside = (na == n_alpha) & (nb == n_beta)
    best = np.inf
    for k in range(len(w)):
        weight = np.linalg.norm(u[inside, k]) ** 2
        if weight > 1 - 1e-8:
            best = min(best, w[k])
    # degenerate eigenspaces can mix sectors; fall back to the block itself
    block = h.to_matrix()[np.ix_(inside, inside)]
    return min(best, np.linalg.eigvalsh(block)[0])


def test_sector_sizes():
    assert sector_basis(4, 1, 1).dim == 4
    assert sector_basis(12, 3, 3).dim == 400
    vac = sector_basis(6, 0, 0)
    assert vac.dim == 1 and vac.states[0] == 0
    with pytest.raises(ValueError):
        sector_basis(4, 3, 0)


def test_sector_states_have_right_spins():
    b = sector_basis(8, 2, 1)
    for s in b.states:
        assert bin(s & 0b01010101).count("1") == 2
        assert bin(s & 0b10101010).count("1") == 1
    assert list(b.states) == sorted(b.states)


def test_constant_hamiltonian():
    e, _ = fci_ground_energy(PauliSum.identity(4, -0.3), sector_basis(4, 1, 1))
    assert e == pytest.approx(-0.3)


def test_symmetry_violation_detected():
    h = PauliSum.from_strings([PauliString.from_label("X0", 4)])
    with pytest.raises(ContractError):
        fci_ground_energy(h, sector_basis(4, 1, 1))


@pytest.mark.parametrize("molecule, r", [("h2", 0.7414), ("h2", 2.0), ("h4", 1.0), ("h4", 2.0)])
def test_sector_energy_matches_full_space(molecule, r):
    ints, prob = problem_for(molecule, r)
    e, _ = fci_ground_energy(prob.hamiltonian, sector_basis(ints.n_qubits, ints.n_alpha, ints.n_beta))
    assert e == pytest.approx(full_space_sector_minimum(prob.hamiltonian, ints.n_alpha, ints.n_beta), abs=1e-10)


def test_fci_matches_producer_values():
    for entry in manifest()["entries"]:
        if entry["molecule"] not in ("h2", "h4", "h6", "lih"):
            continue
        ints, prob = problem_for(entry["molecule"], entry["bond_length"])
        e, _ = fci_ground_energy(prob.hamiltonian, sector_basis(ints.n_qubits, ints.n_alpha, ints.n_beta))
        assert e == pytest.approx(entry["producer_fci_energy"], abs=1e-8)


def test_sector_projection_exact(rng):
    ints, prob = problem_for("h4", 1.5)
    basis = sector_basis(8, 2, 2)
    inside = np.zeros(256, dtype=bool)
    inside[basis.states] = True
    for _ in range(5):
        v = np.zeros(256, dtype=complex)
        v[basis.states] = rng.normal(size=basis.dim)
        hv = apply_hamiltonian(prob.hamiltonian, v)
        assert np.linalg.norm(hv[~inside]) < 1e-10


def test_energy_independent_of_enumeration_order(rng):
    ints, prob = problem_for("h4", 1.0)
    basis = sector_basis(8, 2, 2)
    mat = sector_matrix(prob.hamiltonian, basis)
    perm = rng.permutation(basis.dim)
    e0 = np.linalg.eigvalsh(mat)[0]
    e1 = np.linalg.eigvalsh(mat[np.ix_(perm, perm)])[0]
    assert e0 == pytest.approx(e1, abs=1e-10)


def test_dissociation_reference():
    assert dissociation_reference([(1.0, -1.1)]) == -1.1
    assert dissociation_reference([(0.5, -1.0), (3.0, -0.9), (2.0, -0.95)]) == -0.9
    with pytest.raises(ValueError):
        dissociation_reference([])
