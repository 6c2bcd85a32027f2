"""FCIDUMP reading/writing and the second-quantized molecular Hamiltonian.

Spin orbitals are interleaved: spatial orbital ``p`` with spin alpha is spin
orbital ``2p`` and with spin beta ``2p + 1``. Qubit ``k`` is spin orbital ``k``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fermion import FermionOperator


class FcidumpError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedReferenceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MolecularIntegrals:
    """Spatial-orbital integrals; ``g2[p, q, r, s]`` is (pq|rs) in chemist notation."""

    n_spatial: int
    n_electrons: int
    ms2: int
    core_energy: float
    h1: np.ndarray
    g2: np.ndarray

    def __post_init__(self):
        n = self.n_spatial
        h1 = np.array(self.h1, dtype=float).reshape(n, n)
        g2 = np.array(self.g2, dtype=float).reshape(n, n, n, n)
        h1.setflags(write=False)
        g2.setflags(write=False)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "g2", g2)

    @classmethod
    def zeros(cls, n_spatial: int, n_electrons: int, ms2: int = 0, core_energy: float = 0.0):
        n = n_spatial
        return cls(n, n_electrons, ms2, core_energy, np.zeros((n, n)), np.zeros((n, n, n, n)))

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial

    @property
    def n_alpha(self) -> int:
        return (self.n_electrons + self.ms2) // 2

    @property
    def n_beta(self) -> int:
        return (self.n_electrons - self.ms2) // 2

    def max_abs_diff(self, other: MolecularIntegrals) -> float:
        if (self.n_spatial, self.n_electrons, self.ms2) != (
            other.n_spatial,
            other.n_electrons,
            other.ms2,
        ):
            return float("inf")
        return max(
            abs(self.core_energy - other.core_energy),
            float(np.max(np.abs(self.h1 - other.h1), initial=0.0)),
            float(np.max(np.abs(self.g2 - other.g2), initial=0.0)),
        )

    def symmetry_violation(self) -> float:
        """Largest deviation from h1 symmetry and the 8-fold (pq|rs) symmetry."""
        h, g = self.h1, self.g2
        devs = [np.abs(h - h.T)]
        for perm in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)]:
            devs.append(np.abs(g - g.transpose(perm)))
        return float(max((d.max(initial=0.0) for d in devs), default=0.0))


@dataclass(frozen=True)
class OccupationBitstring:
    n_qubits: int
    bits: tuple[int, ...]

    @property
    def index(self) -> int:
        return sum(1 << k for k, b in enumerate(self.bits) if b)

    @property
    def n_alpha(self) -> int:
        return sum(self.bits[0::2])

    @property
    def n_beta(self) -> int:
        return sum(self.bits[1::2])


_HEADER_INT = re.compile(r"\b(NORB|NELEC|MS2|ISYM)\s*=\s*(-?\d+)", re.IGNORECASE)
_HEADER_UHF = re.compile(r"\bIUHF\s*=\s*(\d+)|\bUHF\s*=\s*\.?T", re.IGNORECASE)
_HEADER_END = re.compile(r"(&END|^\s*/\s*$|/\s*$)", re.IGNORECASE)


def parse_fcidump(text: str) -> MolecularIntegrals:
    """Parse a restricted FCIDUMP. ORBSYM/ISYM are accepted and ignored."""
    lines = text.splitlines()
    header_parts = []
    body_start = None
    for lineno, line in enumerate(lines, start=1):
        header_parts.append(line)
        if _HEADER_END.search(line):
            body_start = lineno
            break
    if body_start is None:
        raise FcidumpError("header is not terminated by &END or /", len(lines) or 1)
    header = " ".join(header_parts)
    if not re.search(r"&FCI", header, re.IGNORECASE):
        raise FcidumpError("header does not start with &FCI", 1)
    if _HEADER_UHF.search(header) and not re.search(r"IUHF\s*=\s*0", header, re.IGNORECASE):
        raise FcidumpError("unrestricted FCIDUMP files are not supported", 1)
    fields = {k.upper(): int(v) for k, v in _HEADER_INT.findall(header)}
    for key in ("NORB", "NELEC"):
        if key not in fields:
            raise FcidumpError(f"header is missing {key}", body_start)
    n = fields["NORB"]
    if n < 0:
        raise FcidumpError("NORB must be non-negative", body_start)

    core = 0.0
    h1 = np.zeros((n, n))
    g2 = np.zeros((n, n, n, n))
    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 5:
            raise FcidumpError(f"expected 'value i j k l', got {line.strip()!r}", lineno)
        try:
            value = float(tokens[0].replace("D", "E").replace("d", "e"))
        except ValueError:
            raise FcidumpError(f"non-numeric value {tokens[0]!r}", lineno) from None
        try:
            i, j, k, l = (int(t) for t in tokens[1:])
        except ValueError:
            raise FcidumpError(f"non-integer index in {line.strip()!r}", lineno) from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > n:
                raise FcidumpError(f"orbital index {idx} outside [1, {n}]", lineno)
        if i == j == k == l == 0:
            core = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                # orbital energy records ("e i 0 0 0") carry no Hamiltonian data
                continue
            h1[i - 1, j - 1] = h1[j - 1, i - 1] = value
        elif 0 in (i, j, k, l):
            raise FcidumpError(f"index pattern {i} {j} {k} {l} is not a valid record", lineno)
        else:
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in (
                (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
            ):
                g2[a, b, c, d] = value
    return MolecularIntegrals(n, fields["NELEC"], fields.get("MS2", 0), core, h1, g2)


def _fmt(value: float) -> str:
    return f"{value: .16e}"


def write_fcidump(ints: MolecularIntegrals) -> str:
    """Canonical FCIDUMP text: unique (pq|rs) representatives, then h1, then core."""
    n = ints.n_spatial
    out = [
        f" &FCI NORB={n},NELEC={ints.n_electrons},MS2={ints.ms2},",
        "  ORBSYM=" + "1," * n,
        "  ISYM=1,",
        " &END",
    ]
    g = ints.g2
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    v = g[i, j, k, l]
                    if v != 0.0:
                        out.append(f"{_fmt(v)} {i + 1:4d} {j + 1:4d} {k + 1:4d} {l + 1:4d}")
    for i in range(n):
        for j in range(i + 1):
            v = ints.h1[i, j]
            if v != 0.0:
                out.append(f"{_fmt(v)} {i + 1:4d} {j + 1:4d}    0    0")
    out.append(f"{_fmt(ints.core_energy)}    0    0    0    0")
    return "\n".join(out) + "\n"


def load_fcidump(path: str | Path) -> MolecularIntegrals:
    return parse_fcidump(Path(path).read_text())


def save_fcidump(ints: MolecularIntegrals, path: str | Path) -> None:
    Path(path).write_text(write_fcidump(ints))


def build_fermionic_hamiltonian(ints: MolecularIntegrals) -> FermionOperator:
    """Spin-orbital Hamiltonian, normal ordered.

    H = E_core + sum h1[p,q] a+_{p s} a_{q s}
        + 1/2 sum (pr|qs) a+_{p s} a+_{q t} a_{s t} a_{r s}
    """
    n = ints.n_spatial
    terms: dict[tuple, float] = {}
    if ints.core_energy != 0.0:
        terms[()] = ints.core_energy

    def add(key, value):
        terms[key] = terms.get(key, 0.0) + value

    for p in range(n):
        for q in range(n):
            v = ints.h1[p, q]
            if v == 0.0:
                continue
            for sigma in (0, 1):
                add(((2 * p + sigma, True), (2 * q + sigma, False)), v)
    g = ints.g2
    for p, r, q, s in zip(*np.nonzero(g)):
        v = 0.5 * g[p, r, q, s]
        for sigma in (0, 1):
            for tau in (0, 1):
                P, Q = 2 * p + sigma, 2 * q + tau
                R, S = 2 * r + sigma, 2 * s + tau
                if P == Q or R == S:
                    continue
                add(((P, True), (Q, True), (S, False), (R, False)), v)
    return FermionOperator(terms).normal_order()


def reference_determinant(ints: MolecularIntegrals) -> OccupationBitstring:
    """RHF singlet determinant: the lowest n_electrons/2 spatial orbitals doubly occupied."""
    if ints.n_electrons % 2 or ints.ms2 != 0:
        raise UnsupportedReferenceError(
            f"RHF singlet reference needs an even electron count and MS2=0 "
            f"(got NELEC={ints.n_electrons}, MS2={ints.ms2})"
        )
    n_occ = ints.n_electrons // 2
    if n_occ > ints.n_spatial:
        raise UnsupportedReferenceError("more electron pairs than spatial orbitals")
    n_qubits = ints.n_qubits
    bits = tuple(1 if k < 2 * n_occ else 0 for k in range(n_qubits))
    return OccupationBitstring(n_qubits, bits)


def rhf_energy(ints: MolecularIntegrals) -> float:
    """Slater-Condon energy of the RHF determinant."""
    occ = range(ints.n_electrons // 2)
    h, g = ints.h1, ints.g2
    e = ints.core_energy + sum(2 * h[i, i] for i in occ)
    for i in occ:
        for j in occ:
            e += 2 * g[i, i, j, j] - g[i, j, j, i]
    return float(e)
