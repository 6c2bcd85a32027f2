"""Regenerate the FCIDUMP fixtures and their manifest with PySCF.

Not a runtime dependency: the package only reads the files this writes.

    python scripts/make_fixtures.py [--out fixtures]
"""

import argparse
import hashlib
import json
from pathlib import Path

import numpy as np
import pyscf
from pyscf import ao2mo, fci, gto, mcscf, scf

from uccorder.integrals import MolecularIntegrals, save_fcidump

GRIDS = {
    "h2": [0.5, 0.7414, 1.0, 1.5, 2.0, 2.5],
    "h4": [0.75, 1.0, 1.5, 2.0],
    "h6": [0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.75, 2.0, 2.5, 3.0],
    "lih": [1.0, 1.3, 1.6, 2.0, 2.5, 3.0, 3.5, 4.0],
    "beh2": [1.0, 1.3, 1.6, 2.0, 2.5, 3.0, 3.5, 4.0],
    "n2": [0.9, 1.1, 1.3, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5, 4.0],
}
# N2 freezes the four MOs built from the N 1s and 2s shells
FROZEN = {"n2": 4}


def atoms_for(molecule, r):
    if molecule.startswith("h") and molecule[1:].isdigit():
        return [("H", (0.0, 0.0, i * r)) for i in range(int(molecule[1:]))]
    if molecule == "lih":
        return [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r))]
    if molecule == "beh2":
        return [("H", (0.0, 0.0, -r)), ("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r))]
    if molecule == "n2":
        return [("N", (0.0, 0.0, 0.0)), ("N", (0.0, 0.0, r))]
    raise KeyError(molecule)


def integrals_for(molecule, r, dm_guess=None):
    mol = gto.M(atom=atoms_for(molecule, r), basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel(dm0=dm_guess)
    if not mf.converged:
        mf.kernel()
    n_frozen = FROZEN.get(molecule, 0)
    nmo = mf.mo_coeff.shape[1]
    ncas = nmo - n_frozen
    nelecas = mol.nelectron - 2 * n_frozen
    mc = mcscf.CASCI(mf, ncas, nelecas)
    h1, ecore = mc.get_h1eff()
    g2 = ao2mo.restore(1, mc.get_h2eff(), ncas)
    e_fci = mc.kernel()[0] if n_frozen else fci.FCI(mf).kernel()[0]
    ints = MolecularIntegrals(ncas, nelecas, 0, float(ecore), h1, g2)
    return ints, mf, float(e_fci)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fixtures")
    args = parser.parse_args()
    out = Path(args.out)
    manifest = {"basis": "sto-3g", "producer": f"pyscf {pyscf.__version__} RHF", "entries": []}
    for molecule, grid in GRIDS.items():
        (out / molecule).mkdir(parents=True, exist_ok=True)
        dm = None
        for r in grid:
            ints, mf, e_fci = integrals_for(molecule, r, dm)
            dm = mf.make_rdm1()
            path = out / molecule / f"{molecule}_{r:.4f}.fcidump"
            save_fcidump(ints, path)
            manifest["entries"].append(
                {
                    "molecule": molecule,
                    "bond_length": r,
                    "file": str(path.relative_to(out)),
                    "geometry": [[a, list(xyz)] for a, xyz in atoms_for(molecule, r)],
                    "frozen_orbitals": FROZEN.get(molecule, 0),
                    "n_spatial": ints.n_spatial,
                    "n_electrons": ints.n_electrons,
                    "rhf_energy": float(mf.e_tot),
                    "producer_fci_energy": e_fci,
                    "sha256": hashlib.sha256(path.read_bytes()).hexdigest(),
                }
            )
            print(f"{molecule} R={r:.4f} E_rhf={mf.e_tot:.10f} E_fci={e_fci:.10f}")
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


if __name__ == "__main__":
    np.set_printoptions(precision=12)
    main()
