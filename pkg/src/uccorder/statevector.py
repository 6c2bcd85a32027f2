"""Dense statevector simulation.

Basis index bit k is the occupation of spin orbital (qubit) k, and
Z|1> = -|1>.

Two layers live here. The reference layer works on full 2**n complex vectors
straight from Pauli sums. The compiled layer (``SectorSpace``,
``ExcitationKernel``, ``restrict_pauli_sum``) works on real vectors over a
list of basis determinants, usually one particle-number/Sz sector; the
optimizer hot loops run there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .fermion import Generator, Term
from .integrals import OccupationBitstring
from .pauli import PauliSum, PauliString, jordan_wigner, strings_commute


class ContractError(ValueError):
    pass


class NumericalError(RuntimeError):
    def __init__(self, message: str, **diagnostics):
        self.diagnostics = diagnostics
        super().__init__(f"{message} {diagnostics}" if diagnostics else message)


def _parity(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(values) & 1


def _i_power(k: int) -> complex:
    return (1, 1j, -1, -1j)[k % 4]


def from_occupation(occ: OccupationBitstring) -> np.ndarray:
    psi = np.zeros(1 << occ.n_qubits, dtype=complex)
    psi[occ.index] = 1.0
    return psi


def n_qubits_of(psi: np.ndarray) -> int:
    n = int(psi.shape[0]).bit_length() - 1
    if psi.ndim != 1 or (1 << n) != psi.shape[0]:
        raise ContractError("statevector length is not a power of two")
    return n


def apply_pauli_string(s: PauliString, psi: np.ndarray) -> np.ndarray:
    if n_qubits_of(psi) != s.n_qubits:
        raise ContractError("size mismatch between Pauli string and state")
    idx = np.arange(psi.shape[0], dtype=np.int64)
    phase = s.coefficient * _i_power(bin(s.x_mask & s.z_mask).count("1"))
    signs = 1.0 - 2.0 * _parity(idx & s.z_mask)
    return (phase * signs * psi)[idx ^ s.x_mask]


def apply_hamiltonian(h: PauliSum, psi: np.ndarray) -> np.ndarray:
    """h|psi>, unnormalized."""
    if n_qubits_of(psi) != h.n_qubits:
        raise ContractError("size mismatch between operator and state")
    idx = np.arange(psi.shape[0], dtype=np.int64)
    out = np.zeros(psi.shape[0], dtype=complex)
    for x, diag in _grouped_phases(h, idx).items():
        out += (diag * psi)[idx ^ x]
    return out


def _grouped_phases(h: PauliSum, states: np.ndarray) -> dict[int, np.ndarray]:
    """Per x mask, the phase each basis state picks up: P|b> = phase(b) |b ^ x>."""
    groups: dict[int, np.ndarray] = {}
    for (x, z), c in h.terms.items():
        phase = c * _i_power(bin(x & z).count("1"))
        contrib = phase * (1.0 - 2.0 * _parity(states & z))
        if x in groups:
            groups[x] = groups[x] + contrib
        else:
            groups[x] = contrib.astype(complex)
    return groups


def expectation(h: PauliSum, psi: np.ndarray) -> float:
    if not h.is_hermitian():
        raise ContractError("expectation value requires a Hermitian operator")
    value = np.vdot(psi, apply_hamiltonian(h, psi))
    if abs(value.imag) > 1e-10:
        raise NumericalError("expectation value has an imaginary part", imag=value.imag)
    return float(value.real)


def generator_pauli(g: Generator, n_qubits: int) -> PauliSum:
    if g.pauli is not None and g.pauli.n_qubits == n_qubits:
        return g.pauli
    return jordan_wigner(g.fermionic, n_qubits)


def apply_exp_generator(g: Generator, theta: float, psi: np.ndarray) -> np.ndarray:
    """exp(theta G)|psi> as the product of the commuting Pauli rotations of G."""
    n = n_qubits_of(psi)
    pauli = generator_pauli(g, n)
    strings = list(pauli)
    if not pauli.is_anti_hermitian():
        raise ContractError(f"generator {g.label} has non-imaginary Pauli coefficients")
    for a in range(len(strings)):
        for b in range(a + 1, len(strings)):
            if not strings_commute(strings[a], strings[b]):
                raise ContractError(f"Pauli terms of generator {g.label} do not commute")
    out = np.array(psi, dtype=complex)
    for s in strings:
        c = s.coefficient.imag  # term is (i c) P
        unit = PauliString(s.n_qubits, s.x_mask, s.z_mask, 1.0)
        out = math.cos(theta * c) * out + 1j * math.sin(theta * c) * apply_pauli_string(unit, out)
    return out


def taylor_expm_action(
    matvec: Callable[[np.ndarray], np.ndarray],
    v: np.ndarray,
    norm_bound: float,
    tol: float = 1e-12,
    max_terms: int = 100,
) -> np.ndarray:
    """exp(A) v by substepped truncated Taylor series.

    ``norm_bound`` must bound ||A||; the step count ceil(norm_bound) keeps
    each substep operator norm at most one.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    steps = max(1, math.ceil(norm_bound))
    step_tol = tol / steps
    out = np.array(v)
    for step in range(steps):
        term = out
        total = out.copy()
        for m in range(1, max_terms + 1):
            term = matvec(term) / (steps * m)
            total += term
            if np.linalg.norm(term) < step_tol * 1e-2:
                break
        else:
            raise NumericalError(
                "Taylor series did not converge",
                step=step,
                steps=steps,
                last_term_norm=float(np.linalg.norm(term)),
            )
        out = total
    return out


def apply_exp_sum(
    gens: Sequence[tuple[Generator, float]], psi: np.ndarray, tol: float = 1e-12
) -> np.ndarray:
    """exp(sum_k theta_k G_k)|psi> without any product splitting."""
    n = n_qubits_of(psi)
    total = PauliSum(n)
    bound = 0.0
    for g, theta in gens:
        pauli = generator_pauli(g, n)
        total = total + pauli * theta
        bound += abs(theta) * pauli.one_norm()
    out = taylor_expm_action(lambda v: apply_hamiltonian(total, v), psi, bound, tol)
    drift = abs(np.linalg.norm(out) - np.linalg.norm(psi))
    if drift > max(tol, 1e-12):
        raise NumericalError("norm drift in exp_sum", drift=drift)
    return out


# ---------------------------------------------------------------------------
# compiled layer


@dataclass(frozen=True, eq=False)
class SectorSpace:
    """Sorted list of basis determinants spanning an invariant subspace."""

    n_qubits: int
    states: np.ndarray

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.int64)
        if states.ndim != 1 or np.any(np.diff(states) <= 0):
            raise ValueError("states must be strictly ascending")
        object.__setattr__(self, "states", states)

    @classmethod
    def full(cls, n_qubits: int) -> SectorSpace:
        return cls(n_qubits, np.arange(1 << n_qubits, dtype=np.int64))

    @property
    def dim(self) -> int:
        return int(self.states.shape[0])

    def locate(self, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Positions of ``targets`` in the space and a mask of which were found."""
        pos = np.searchsorted(self.states, targets)
        pos = np.minimum(pos, self.dim - 1)
        return pos, self.states[pos] == targets

    def basis_vector(self, occ: OccupationBitstring) -> np.ndarray:
        pos, found = self.locate(np.array([occ.index]))
        if not found[0]:
            raise ContractError("reference determinant lies outside the space")
        v = np.zeros(self.dim)
        v[pos[0]] = 1.0
        return v

    def embed(self, v: np.ndarray) -> np.ndarray:
        full = np.zeros(1 << self.n_qubits, dtype=complex)
        full[self.states] = v
        return full

    def project(self, psi: np.ndarray) -> np.ndarray:
        return np.asarray(psi)[self.states]


def restrict_pauli_sum(h: PauliSum, space: SectorSpace, atol: float = 1e-10) -> sp.csr_matrix:
    """Matrix of h on the space; raises if h leaks amplitude out of it."""
    if h.n_qubits != space.n_qubits:
        raise ContractError("size mismatch between operator and space")
    rows, cols, vals = [], [], []
    col_idx = np.arange(space.dim)
    for x, phases in _grouped_phases(h, space.states).items():
        pos, found = space.locate(space.states ^ x)
        leak = np.abs(phases[~found])
        if leak.size and leak.max() > atol:
            raise ContractError(
                f"operator does not preserve the space (leak {leak.max():.3e} via x-mask {x:#x})"
            )
        keep = found & (np.abs(phases) > 0)
        rows.append(pos[keep])
        cols.append(col_idx[keep])
        vals.append(phases[keep])
    if rows:
        r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    else:
        r = c = np.zeros(0, dtype=np.int64)
        v = np.zeros(0, dtype=complex)
    if v.size and np.max(np.abs(v.imag)) < 1e-12:
        v = v.real
    mat = sp.csr_matrix((v, (r, c)), shape=(space.dim, space.dim))
    mat.sum_duplicates()
    return mat


def _apply_term_vectorized(term: Term, states: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized action of a ladder product on many determinants.

    Returns (alive mask, sign, resulting states).
    """
    alive = np.ones(states.shape[0], dtype=bool)
    sign = np.ones(states.shape[0])
    cur = states.copy()
    for index, dagger in reversed(term):
        bit = 1 << index
        occupied = (cur & bit) != 0
        alive &= occupied != dagger
        sign *= 1.0 - 2.0 * _parity(cur & (bit - 1))
        cur = cur ^ bit
    return alive, sign, cur


class ExcitationKernel:
    """exp(theta G) on a SectorSpace as exact two-level rotations.

    Each component T of G maps a source determinant s to sign * d; the pairs
    (s, d) are disjoint, so exp(theta (T - T+)) rotates each pair by theta.
    """

    def __init__(self, generator: Generator, space: SectorSpace):
        self.generator = generator
        self.parts: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        for comp in generator.components:
            alive, sign, dst_states = _apply_term_vectorized(comp, space.states)
            src = np.nonzero(alive)[0]
            dst, found = space.locate(dst_states[alive])
            if not np.all(found):
                raise ContractError(f"generator {generator.label} leaves the space")
            if np.intersect1d(src, dst[found]).size:
                raise ContractError(f"generator {generator.label} component is not a rotation")
            self.parts.append((src, dst, sign[alive]))

    def apply(self, v: np.ndarray, theta: float) -> None:
        """In-place v <- exp(theta G) v."""
        c, s = math.cos(theta), math.sin(theta)
        for src, dst, sign in self.parts:
            a = v[src]
            b = v[dst]
            v[src] = c * a - s * sign * b
            v[dst] = c * b + s * sign * a

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(v)
        for src, dst, sign in self.parts:
            out[dst] += sign * v[src]
            out[src] -= sign * v[dst]
        return out

    def inner(self, left: np.ndarray, right: np.ndarray) -> float:
        """<left| G |right> for real vectors."""
        total = 0.0
        for src, dst, sign in self.parts:
            total += float(np.dot(sign, left[dst] * right[src] - left[src] * right[dst]))
        return total

    def to_sparse(self, dim: int) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for src, dst, sign in self.parts:
            rows += [dst, src]
            cols += [src, dst]
            vals += [sign, -sign]
        if not rows:
            return sp.csr_matrix((dim, dim))
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        )

    @property
    def one_norm(self) -> float:
        # each component contributes an operator of norm 1
        return float(len(self.parts))
