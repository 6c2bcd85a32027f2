from itertools import permutations

import numpy as np
import pytest

from uccorder.ansatz import (
    OrderingStrategy,
    kupccgsd_pool,
    order_program,
    program_from_ids,
    set_trotter_number,
    sub_pool,
    uccsd_pool,
)
from uccorder.bfgs import BFGSOptions, minimize_bfgs as raw_bfgs
from uccorder.fci import fci_ground_energy, sector_basis
from uccorder.integrals import rhf_energy
from uccorder.rng import SplitMix64, substream_seed
from uccorder.statevector import ContractError
from uccorder.vqe import (
    InitSpec,
    VQEOptions,
    commutator_scores,
    energy,
    energy_and_gradient,
    gradient_fd,
    minimize_bfgs,
    optimize_with_restarts,
    prepare_state,
    sgo_ordering,
    untrotterized,
)

from conftest import problem_for


def fci(molecule, r):
    ints, prob = problem_for(molecule, r)
    return fci_ground_energy(prob.hamiltonian, sector_basis(ints.n_qubits, ints.n_alpha, ints.n_beta))[0]


def test_theta_zero_energy_is_rhf():
    for molecule, r in [("h2", 0.7414), ("h4", 1.5), ("h6", 2.0)]:
        ints, prob = problem_for(molecule, r)
        pool = uccsd_pool(ints.n_spatial, ints.n_alpha, ints.n_beta)
        prog = order_program(pool, OrderingStrategy())
        assert energy(prog, np.zeros(len(pool)), prob) == pytest.approx(rhf_energy(ints), abs=1e-10)


def test_h2_every_ordering_exact():
    ints, prob = problem_for("h2", 0.7414)
    target = fci("h2", 0.7414)
    pool = uccsd_pool(2, 1, 1)
    for perm in permutations(range(3)):
        res = minimize_bfgs(program_from_ids(pool, perm), np.zeros(3), prob)
        assert res.converged
        assert abs(res.energy - target) < 1e-8
    res = minimize_bfgs(untrotterized(order_program(pool, OrderingStrategy())), np.zeros(3), prob)
    assert abs(res.energy - target) < 1e-8


@pytest.mark.parametrize("molecule, r", [("h2", 1.5), ("h4", 1.0), ("h4", 2.0)])
def test_gradient_matches_finite_differences(molecule, r):
    ints, prob = problem_for(molecule, r)
    pool = uccsd_pool(ints.n_spatial, ints.n_alpha, ints.n_beta)
    for s in range(10):
        rng = SplitMix64(substream_seed(99, s))
        prog = order_program(pool, OrderingStrategy("random_shuffle", s))
        theta = np.array([rng.uniform(-1, 1) for _ in range(len(pool))])
        _, g = energy_and_gradient(prog, theta, prob)
        assert np.max(np.abs(g - gradient_fd(prog, theta, prob))) < 1e-6


def test_gradient_with_trotter_steps_and_blocks(rng):
    _, prob = problem_for("h4", 1.5)
    prog = set_trotter_number(order_program(kupccgsd_pool(4, 2), OrderingStrategy("random_shuffle", 4)), 3)
    theta = rng.uniform(-0.5, 0.5, prog.n_params)
    _, g = energy_and_gradient(prog, theta, prob)
    assert np.max(np.abs(g - gradient_fd(prog, theta, prob))) < 1e-6


def test_gradient_at_reference_is_commutator():
    _, prob = problem_for("h4", 1.0)
    pool = uccsd_pool(4, 2, 2)
    prog = order_program(pool, OrderingStrategy())
    _, g = energy_and_gradient(prog, np.zeros(len(pool)), prob)
    np.testing.assert_allclose(np.abs(g), commutator_scores(prob.ref_vector, pool.generators, prob), atol=1e-12)


def test_analytic_gradient_needs_trotterized():
    _, prob = problem_for("h2", 0.7414)
    prog = untrotterized(order_program(uccsd_pool(2, 1, 1), OrderingStrategy()))
    with pytest.raises(ContractError):
        energy_and_gradient(prog, np.zeros(3), prob)
    with pytest.raises(ContractError):
        energy(prog, np.zeros(4), prob)


def test_bfgs_quadratic_bowl():
    rng = np.random.default_rng(3)
    # finite termination assumes (near-)exact line searches
    for d in (2, 5, 10, 20):
        m = rng.normal(size=(d, d))
        a = m @ m.T + d * np.eye(d)
        b = rng.normal(size=d)
        exact = np.linalg.solve(a, b)
        res = raw_bfgs(lambda x: (0.5 * x @ a @ x - b @ x, a @ x - b), np.zeros(d), BFGSOptions(c2=1e-3))
        assert res.converged
        assert res.iterations <= d + 2
        np.testing.assert_allclose(res.x, exact, atol=1e-7)


def test_bfgs_rosenbrock():
    def f(x):
        val = (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2
        grad = np.array([-2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2), 200 * (x[1] - x[0] ** 2)])
        return val, grad

    res = raw_bfgs(f, np.array([-1.2, 1.0]))
    assert res.converged
    np.testing.assert_allclose(res.x, [1, 1], atol=1e-6)


def test_stationary_start():
    _, prob = problem_for("h4", 1.0)
    prog = order_program(uccsd_pool(4, 2, 2), OrderingStrategy("random_shuffle", 1))
    first = minimize_bfgs(prog, np.zeros(prog.n_params), prob)
    again = minimize_bfgs(prog, first.parameters, prob)
    assert again.iterations <= 2
    assert abs(again.energy - first.energy) < 1e-12


def test_restarts():
    _, prob = problem_for("h2", 1.5)
    prog = order_program(uccsd_pool(2, 1, 1), OrderingStrategy())
    best, results = optimize_with_restarts(prog, prob, 1)
    direct = minimize_bfgs(prog, np.zeros(3), prob)
    assert best.energy == direct.energy
    np.testing.assert_array_equal(best.parameters, direct.parameters)
    best, results = optimize_with_restarts(prog, prob, 4, InitSpec("uniform"), seed=8)
    assert len(results) == 4
    assert best.energy == min(r.energy for r in results)
    again, _ = optimize_with_restarts(prog, prob, 4, InitSpec("uniform"), seed=8)
    assert again.energy == best.energy
    with pytest.raises(ValueError):
        optimize_with_restarts(prog, prob, 0)


def test_init_spec():
    assert not InitSpec().draw(4, 1).any()
    draw = InitSpec("uniform", -0.5, 0.5).draw(1000, 7)
    assert draw.min() >= -0.5 and draw.max() < 0.5
    np.testing.assert_array_equal(draw, InitSpec("uniform").draw(1000, 7))
    with pytest.raises(ValueError):
        InitSpec("normal").draw(2, 0)


def test_variational_bound_on_random_states(rng):
    _, prob = problem_for("h4", 2.0)
    floor = fci("h4", 2.0)
    prog = order_program(kupccgsd_pool(4, 2), OrderingStrategy("random_shuffle", 9))
    for _ in range(20):
        assert energy(prog, rng.uniform(-3, 3, prog.n_params), prob) >= floor - 1e-9


def test_sgo_h2_double_first():
    _, prob = problem_for("h2", 0.7414)
    pool = uccsd_pool(2, 1, 1)
    prog, trace, result = sgo_ordering(pool, prob)
    assert trace[0].label.startswith("double")
    assert [t.generator_id for t in trace] == [s.generator_id for s in prog.slots]
    assert sorted(t.generator_id for t in trace) == [0, 1, 2]
    assert abs(result.energy - fci("h2", 0.7414)) < 1e-8


def test_sgo_step_one_is_argmax():
    _, prob = problem_for("h4", 1.5)
    pool = uccsd_pool(4, 2, 2)
    scores = commutator_scores(prob.ref_vector, pool.generators, prob)
    _, trace, _ = sgo_ordering(pool, prob)
    assert trace[0].score == pytest.approx(scores.max(), abs=1e-14)
    top = np.flatnonzero(scores >= scores.max() - 1e-12)
    assert trace[0].generator_id == top[0]
    assert len(trace) == len(pool)
    # energies never rise when every parameter is re-optimized
    energies = [t.energy for t in trace]
    assert all(b <= a + 1e-10 for a, b in zip(energies, energies[1:]))


def test_sgo_single_generator_pool():
    _, prob = problem_for("h2", 0.7414)
    pool = uccsd_pool(2, 1, 1)
    solo = sub_pool(pool, [2])
    prog, trace, _ = sgo_ordering(solo, prob)
    assert len(trace) == 1 and prog.n_params == 1


def test_sgo_without_reoptimization_runs():
    _, prob = problem_for("h4", 1.5)
    pool = uccsd_pool(4, 2, 2)
    prog, trace, res = sgo_ordering(pool, prob, reoptimize=False)
    assert prog.n_params == len(pool)
    assert res.energy == pytest.approx(energy(prog, res.parameters, prob), abs=1e-12)
    assert res.energy >= fci("h4", 1.5) - 1e-9


def test_sgo_rejects_repeated_blocks():
    _, prob = problem_for("h4", 1.0)
    with pytest.raises(ValueError):
        sgo_ordering(kupccgsd_pool(4, 2), prob)


@pytest.mark.parametrize("molecule, r", [("h2", 2.0), ("h4", 1.0)])
def test_reused_parameters_are_worse(molecule, r):
    ints, prob = problem_for(molecule, r)
    pool = uccsd_pool(ints.n_spatial, ints.n_alpha, ints.n_beta)
    prog = order_program(pool, OrderingStrategy("random_shuffle", 21))
    trot = minimize_bfgs(prog, np.zeros(len(pool)), prob)
    unt = untrotterized(prog)
    reused = energy(unt, trot.parameters, prob)
    direct = minimize_bfgs(unt, np.zeros(len(pool)), prob)
    assert reused >= direct.energy - 1e-9
