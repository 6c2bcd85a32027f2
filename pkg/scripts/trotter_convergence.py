"""Distance between the n-step product state and the summed exponential, n = 1..64.

    python scripts/trotter_convergence.py --amplitude 0.2
"""

import argparse

import numpy as np

from uccorder.ansatz import OrderingStrategy, order_program, set_trotter_number, uccsd_pool
from uccorder.integrals import load_fcidump
from uccorder.rng import SplitMix64
from uccorder.vqe import VQEProblem, prepare_state, untrotterized


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--fixture", default="fixtures/h4/h4_1.0000.fcidump")
    parser.add_argument("--amplitude", type=float, default=0.2)
    parser.add_argument("--seed", type=int, default=44)
    args = parser.parse_args()
    ints = load_fcidump(args.fixture)
    problem = VQEProblem.from_integrals(ints)
    program = order_program(uccsd_pool(ints.n_spatial, ints.n_alpha, ints.n_beta), OrderingStrategy("random_shuffle", 4))
    rng = SplitMix64(args.seed)
    theta = np.array([rng.uniform(-args.amplitude, args.amplitude) for _ in range(program.n_params)])
    exact = prepare_state(untrotterized(program), theta, problem)
    prev = None
    for n in (1, 2, 4, 8, 16, 32, 64):
        d = np.linalg.norm(prepare_state(set_trotter_number(program, n), theta, problem) - exact)
        ratio = "" if prev is None else f"  D(n)/D(n/2) = {d / prev:.4f}"
        print(f"n = {n:3d}  D = {d:.3e}{ratio}")
        prev = d


if __name__ == "__main__":
    main()
