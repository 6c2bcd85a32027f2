"""Ordering spread of 1-UpCCGSD against 2-UpCCGSD on H6.

    python scripts/kupccgsd_contrast.py --ensemble-size 10
"""

import argparse

from uccorder.constants import HARTREE_TO_KCAL
from uccorder.lab.config import load_config
from uccorder.lab.experiments import run_ensemble, summarize


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--ensemble-size", type=int, default=100)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    for k in (1, 2):
        config = load_config(f"scripts/configs/h6_kupccgsd_k{k}.ini")
        config = config.with_(ensemble_size=args.ensemble_size, threads=args.threads)
        records = [run_ensemble(config, path) for path in config.fixtures]
        summarize(records, config.out)
        for rec in records:
            errs = [(e - rec.fci_energy) * HARTREE_TO_KCAL for e in rec.energies]
            print(f"k={k} R={rec.bond_length:.3f} error min {min(errs):8.3f} max {max(errs):8.3f} "
                  f"range {rec.stats.range * HARTREE_TO_KCAL:8.3f} kcal/mol")


if __name__ == "__main__":
    main()
