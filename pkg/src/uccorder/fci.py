"""Exact ground-state energies inside a fixed (N_alpha, N_beta) sector."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .pauli import PauliSum
from .statevector import ContractError, SectorSpace, restrict_pauli_sum

DENSE_LIMIT = 5000


@dataclass(frozen=True, eq=False)
class SectorBasis:
    n_qubits: int
    n_alpha: int
    n_beta: int
    states: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.states.shape[0])

    def space(self) -> SectorSpace:
        return SectorSpace(self.n_qubits, self.states)


def sector_basis(n_qubits: int, n_alpha: int, n_beta: int) -> SectorBasis:
    """Ascending determinants with n_alpha even-position and n_beta odd-position bits set."""
    if n_qubits % 2:
        raise ValueError("interleaved spin orbitals need an even qubit count")
    n_spatial = n_qubits // 2
    if not (0 <= n_alpha <= n_spatial and 0 <= n_beta <= n_spatial):
        raise ValueError(f"cannot place ({n_alpha}, {n_beta}) electrons in {n_spatial} orbitals")
    alpha = [sum(1 << (2 * p) for p in occ) for occ in combinations(range(n_spatial), n_alpha)]
    beta = [sum(1 << (2 * p + 1) for p in occ) for occ in combinations(range(n_spatial), n_beta)]
    states = np.array(sorted(a | b for a in alpha for b in beta), dtype=np.int64)
    return SectorBasis(n_qubits, n_alpha, n_beta, states)


def sector_matrix(h: PauliSum, basis: SectorBasis) -> np.ndarray:
    """Dense real-symmetric sector Hamiltonian; checks the sector is invariant."""
    if not h.is_hermitian():
        raise ContractError("FCI needs a Hermitian Hamiltonian")
    if basis.dim > DENSE_LIMIT:
        raise ContractError(f"sector dimension {basis.dim} exceeds dense limit {DENSE_LIMIT}")
    mat = restrict_pauli_sum(h, basis.space()).toarray()
    if np.iscomplexobj(mat):
        if np.max(np.abs(mat.imag), initial=0.0) > 1e-10:
            raise ContractError("sector Hamiltonian is not real")
        mat = mat.real
    if np.max(np.abs(mat - mat.T), initial=0.0) > 1e-10:
        raise ContractError("sector Hamiltonian is not symmetric")
    return mat


def fci_ground_energy(h: PauliSum, basis: SectorBasis) -> tuple[float, np.ndarray]:
    mat = sector_matrix(h, basis)
    evals, evecs = np.linalg.eigh(mat)
    return float(evals[0]), evecs[:, 0]


def dissociation_reference(scan: Sequence[tuple[float, float]]) -> float:
    """FCI energy at the largest bond length of the scan."""
    if not scan:
        raise ValueError("dissociation reference of an empty scan")
    return float(max(scan, key=lambda pair: pair[0])[1])
