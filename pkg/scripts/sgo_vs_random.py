"""Where the sequential gradient ordering lands inside random-ordering ensembles (H6 UCCSD).

    python scripts/sgo_vs_random.py --members 20 --geometries 1.5 2.0 2.5 3.0
"""

import argparse

import numpy as np

from uccorder.ansatz import uccsd_pool
from uccorder.constants import HARTREE_TO_KCAL
from uccorder.lab.config import ExperimentConfig
from uccorder.lab.experiments import load_problem, run_ensemble
from uccorder.vqe import sgo_ordering


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--members", type=int, default=20)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--geometries", type=float, nargs="+", default=[1.5, 1.75, 2.0, 2.5, 3.0])
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    for r in args.geometries:
        path = f"fixtures/h6/h6_{r:.4f}.fcidump"
        config = ExperimentConfig(fixtures=(path,), seed=args.seed, ensemble_size=args.members, threads=args.threads)
        rec = run_ensemble(config, write=False)
        _, problem, _ = load_problem(path)
        variants = {}
        for reopt in (True, False):
            _, _, res = sgo_ordering(uccsd_pool(6, 3, 3), problem, reoptimize=reopt)
            variants[reopt] = (res.energy - rec.fci_energy) * 1e3
        errs = (np.array(rec.energies) - rec.fci_energy) * 1e3
        rank = int(np.sum(errs < variants[True]))
        print(f"R={r:.3f} random [{errs.min():8.3f}, {errs.max():8.3f}] mHa  sgo {variants[True]:8.3f} "
              f"(beats {args.members - rank}/{args.members})  sgo without re-optimization {variants[False]:8.3f}  "
              f"range {np.ptp(errs) / 1e3 * HARTREE_TO_KCAL:.2f} kcal/mol")


if __name__ == "__main__":
    main()
