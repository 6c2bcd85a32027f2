"""Shared numerical constants."""

HARTREE_TO_KCAL = 627.509474
BOHR_TO_ANGSTROM = 0.52917721
CHEMICAL_ACCURACY_HA = 1.0 / HARTREE_TO_KCAL  # 1 kcal/mol

COEFF_ATOL = 1e-14  # terms below this magnitude are dropped from operator sums
