"""Energies, gradients, BFGS minimization, restarts and sequential gradient ordering.

All evaluation runs on real vectors over the reference's particle-number/Sz
sector; every excitation generator and the molecular Hamiltonian preserve it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .ansatz import (
    TROTTERIZED,
    UNTROTTERIZED,
    AnsatzProgram,
    OrderingStrategy,
    Pool,
    program_from_ids,
)
from .bfgs import BFGSOptions, minimize_bfgs as _bfgs
from .fci import sector_basis
from .fermion import Generator
from .integrals import MolecularIntegrals, OccupationBitstring, build_fermionic_hamiltonian, reference_determinant
from .pauli import PauliSum, jordan_wigner
from .rng import SplitMix64, substream_seed
from .statevector import ContractError, ExcitationKernel, SectorSpace, restrict_pauli_sum, taylor_expm_action


@dataclass(frozen=True)
class VQEOptions:
    gtol: float = 1e-8
    max_iter: int = 10000
    c1: float = 1e-4
    c2: float = 0.9
    fd_step: float = 1e-5
    expm_tol: float = 1e-12

    def bfgs(self) -> BFGSOptions:
        return BFGSOptions(gtol=self.gtol, max_iter=self.max_iter, c1=self.c1, c2=self.c2)


@dataclass
class VQEResult:
    energy: float
    parameters: np.ndarray
    iterations: int
    final_gradient_norm: float
    converged: bool
    wall_time: float
    message: str = ""
    n_evals: int = 0
    history: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "parameters": [float(t) for t in self.parameters],
            "iterations": self.iterations,
            "final_gradient_norm": self.final_gradient_norm,
            "converged": self.converged,
            "message": self.message,
            "n_evals": self.n_evals,
            "wall_time": self.wall_time,
        }


class VQEProblem:
    """Qubit Hamiltonian plus reference determinant, compiled onto the reference sector."""

    def __init__(self, hamiltonian: PauliSum, reference: OccupationBitstring, space: SectorSpace | None = None):
        if hamiltonian.n_qubits != reference.n_qubits:
            raise ContractError("Hamiltonian and reference act on different register sizes")
        if not hamiltonian.is_hermitian():
            raise ContractError("Hamiltonian must be Hermitian")
        self.hamiltonian = hamiltonian
        self.reference = reference
        if space is None:
            space = sector_basis(reference.n_qubits, reference.n_alpha, reference.n_beta).space()
        self.space = space
        h = restrict_pauli_sum(hamiltonian, space)
        if np.iscomplexobj(h.data):
            raise ContractError("sector Hamiltonian is not real")
        self.h_matrix: sp.csr_matrix = h
        self.ref_vector = space.basis_vector(reference)
        self._kernels: dict = {}
        self._sparse: dict = {}

    @classmethod
    def from_integrals(cls, ints: MolecularIntegrals) -> VQEProblem:
        h = jordan_wigner(build_fermionic_hamiltonian(ints), ints.n_qubits)
        return cls(h, reference_determinant(ints))

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    def kernel(self, g: Generator) -> ExcitationKernel:
        key = g.components
        k = self._kernels.get(key)
        if k is None:
            k = self._kernels[key] = ExcitationKernel(g, self.space)
        return k

    def generator_matrix(self, g: Generator) -> sp.csr_matrix:
        key = g.components
        m = self._sparse.get(key)
        if m is None:
            m = self._sparse[key] = self.kernel(g).to_sparse(self.space.dim)
        return m

    def apply_h(self, v: np.ndarray) -> np.ndarray:
        return self.h_matrix @ v

    def expectation(self, v: np.ndarray) -> float:
        return float(v @ (self.h_matrix @ v))


def _check_theta(program: AnsatzProgram, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (program.n_params,):
        raise ContractError(f"expected {program.n_params} parameters, got shape {theta.shape}")
    return theta


def prepare_state(program: AnsatzProgram, theta, problem: VQEProblem, tol: float = 1e-12) -> np.ndarray:
    """Ansatz state on the problem's sector space."""
    theta = _check_theta(program, theta)
    v = problem.ref_vector.copy()
    if program.form == TROTTERIZED:
        for g, p, scale in program.applied_factors():
            problem.kernel(g).apply(v, theta[p] * scale)
        return v
    for block in program.blocks():
        a = sp.csr_matrix((problem.space.dim, problem.space.dim))
        bound = 0.0
        for s in block:
            g = program.generator(s)
            t = theta[s.parameter_index]
            if t != 0.0:
                a = a + t * problem.generator_matrix(g)
                bound += abs(t) * problem.kernel(g).one_norm
        if bound > 0:
            v = taylor_expm_action(lambda w: a @ w, v, bound, tol)
    return v


def energy(program: AnsatzProgram, theta, problem: VQEProblem) -> float:
    return problem.expectation(prepare_state(program, theta, problem))


def energy_and_gradient(program: AnsatzProgram, theta, problem: VQEProblem) -> tuple[float, np.ndarray]:
    """Energy and exact gradient by a reverse sweep over the applied factors."""
    if program.form != TROTTERIZED:
        raise ContractError("analytic gradient needs a trotterized program; use gradient_fd")
    theta = _check_theta(program, theta)
    phi = prepare_state(program, theta, problem)
    lam = problem.apply_h(phi)
    e = float(phi @ lam)
    grad = np.zeros(program.n_params)
    for g, p, scale in reversed(program.applied_factors()):
        k = problem.kernel(g)
        grad[p] += 2.0 * scale * k.inner(lam, phi)
        k.apply(phi, -theta[p] * scale)
        k.apply(lam, -theta[p] * scale)
    return e, grad


def gradient(program: AnsatzProgram, theta, problem: VQEProblem) -> np.ndarray:
    return energy_and_gradient(program, theta, problem)[1]


def gradient_fd(program: AnsatzProgram, theta, problem: VQEProblem, h: float = 1e-5) -> np.ndarray:
    """Central differences (E(theta + h e_k) - E(theta - h e_k)) / 2h."""
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    theta = _check_theta(program, theta)
    grad = np.zeros(program.n_params)
    for k in range(program.n_params):
        tp, tm = theta.copy(), theta.copy()
        tp[k] += h
        tm[k] -= h
        grad[k] = (energy(program, tp, problem) - energy(program, tm, problem)) / (2 * h)
    return grad


def minimize_bfgs(
    program: AnsatzProgram, theta0, problem: VQEProblem, opts: VQEOptions = VQEOptions()
) -> VQEResult:
    theta0 = _check_theta(program, theta0)
    start = time.perf_counter()
    if program.form == TROTTERIZED:

        def fun_grad(t):
            return energy_and_gradient(program, t, problem)

    else:

        def fun_grad(t):
            return energy(program, t, problem), gradient_fd(program, t, problem, opts.fd_step)

    if program.n_params == 0:
        e = energy(program, theta0, problem)
        return VQEResult(e, theta0, 0, 0.0, True, time.perf_counter() - start, "no parameters", 1, [e])
    res = _bfgs(fun_grad, theta0, opts.bfgs())
    return VQEResult(
        energy=float(res.fun),
        parameters=res.x,
        iterations=res.iterations,
        final_gradient_norm=res.grad_norm,
        converged=res.converged,
        wall_time=time.perf_counter() - start,
        message=res.message,
        n_evals=res.n_evals,
        history=res.history,
    )


@dataclass(frozen=True)
class InitSpec:
    """Initial-parameter distribution: zeros, or uniform on [low, high) per component."""

    kind: str = "zeros"
    low: float = -0.5
    high: float = 0.5

    def draw(self, n: int, seed: int) -> np.ndarray:
        if self.kind == "zeros":
            return np.zeros(n)
        if self.kind == "uniform":
            rng = SplitMix64(seed)
            return np.array([rng.uniform(self.low, self.high) for _ in range(n)])
        raise ValueError(f"unknown init distribution {self.kind!r}")


def optimize_with_restarts(
    program: AnsatzProgram,
    problem: VQEProblem,
    m: int,
    init: InitSpec = InitSpec(),
    seed: int = 0,
    opts: VQEOptions = VQEOptions(),
) -> tuple[VQEResult, list[VQEResult]]:
    """m minimizations from theta0 drawn with substream seed (seed, r); best is the lowest energy."""
    if m < 1:
        raise ValueError("need at least one restart")
    results = []
    for r in range(m):
        theta0 = init.draw(program.n_params, substream_seed(seed, r))
        results.append(minimize_bfgs(program, theta0, problem, opts))
    best = min(results, key=lambda res: res.energy)
    return best, results


@dataclass(frozen=True)
class SGOStep:
    generator_id: int
    label: str
    score: float
    energy: float


def commutator_scores(
    state: np.ndarray, candidates: Sequence[Generator], problem: VQEProblem
) -> np.ndarray:
    """|<psi|[H, G]|psi>| = |2 <H psi|G psi>| for each candidate."""
    h_state = problem.apply_h(state)
    return np.array([abs(2.0 * problem.kernel(g).inner(h_state, state)) for g in candidates])


def sgo_ordering(
    pool: Pool,
    problem: VQEProblem,
    opts: VQEOptions = VQEOptions(),
    reoptimize: bool = True,
    tie_tol: float = 1e-12,
) -> tuple[AnsatzProgram, list[SGOStep], VQEResult]:
    """Grow an ordering by repeatedly appending the unused generator with the largest gradient.

    Each generator is used once. With ``reoptimize`` every parameter is
    re-optimized after each addition (new parameter starts at 0); otherwise
    only the new one is. Scores within ``tie_tol`` of the maximum count as
    ties and go to the lowest generator id.
    """
    if not pool.generators:
        raise ValueError("cannot order an empty pool")
    if pool.n_blocks > 1:
        raise ValueError("sequential gradient ordering is undefined for pools with repeated blocks")
    remaining = list(pool.generators)
    chosen: list[int] = []
    theta = np.zeros(0)
    trace: list[SGOStep] = []
    result = None
    strategy = OrderingStrategy("sgo")
    state = problem.ref_vector.copy()
    while remaining:
        scores = commutator_scores(state, remaining, problem)
        best = scores.max()
        pick = min(i for i, s in enumerate(scores) if s >= best - tie_tol)
        g = remaining.pop(pick)
        chosen.append(g.id)
        program = program_from_ids(pool, chosen, strategy)
        theta = np.append(theta, 0.0)
        if reoptimize:
            result = minimize_bfgs(program, theta, problem, opts)
            theta = result.parameters
        else:
            sub = program_from_ids(pool, [g.id])
            prefix = state.copy()
            single_problem = _StartedProblem(problem, prefix)
            part = minimize_bfgs(sub, np.zeros(1), single_problem, opts)
            theta[-1] = part.parameters[0]
            result = part
        state = prepare_state(program, theta, problem)
        e = problem.expectation(state)
        trace.append(SGOStep(g.id, g.label, float(scores[pick]), e))
    final = program_from_ids(pool, chosen, strategy)
    if not reoptimize:
        result = VQEResult(
            energy(final, theta, problem), theta, result.iterations, result.final_gradient_norm,
            result.converged, result.wall_time, "sgo without re-optimization",
        )
    return final, trace, result


class _StartedProblem(VQEProblem):
    """View of a problem whose reference vector is an arbitrary prepared state."""

    def __init__(self, base: VQEProblem, start: np.ndarray):
        self.__dict__.update(base.__dict__)
        self.ref_vector = start


def untrotterized(program: AnsatzProgram) -> AnsatzProgram:
    return program.with_form(UNTROTTERIZED)
