"""Bit-mask Pauli algebra and the Jordan-Wigner transform.

Qubit k of a string carries X if only the x bit is set, Z if only the z bit,
Y if both. Internally a string with masks (x, z) and unit coefficient is the
operator i^{|x & z|} X^x Z^z.

Jordan-Wigner: a+_p = 1/2 (X_p - i Y_p) Z_{p-1} ... Z_0 and
a_p = 1/2 (X_p + i Y_p) Z_{p-1} ... Z_0, so |1> on qubit k means spin
orbital k is occupied.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .constants import COEFF_ATOL
from .fermion import FermionOperator

_I_POW = (1, 1j, -1, -1j)


class PauliError(ValueError):
    pass


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _product_phase(x1: int, z1: int, x2: int, z2: int) -> complex:
    x, z = x1 ^ x2, z1 ^ z2
    k = _popcount(x1 & z1) + _popcount(x2 & z2) - _popcount(x & z) + 2 * _popcount(z1 & x2)
    return _I_POW[k % 4]


@dataclass(frozen=True)
class PauliString:
    n_qubits: int
    x_mask: int
    z_mask: int
    coefficient: complex = 1.0

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if self.x_mask >= limit or self.z_mask >= limit or self.x_mask < 0 or self.z_mask < 0:
            raise PauliError(f"masks do not fit {self.n_qubits} qubits")

    @classmethod
    def from_label(cls, label: str, n_qubits: int, coefficient: complex = 1.0) -> PauliString:
        """Build from e.g. "X0 Z1 Y3"; an empty label is the identity."""
        x = z = 0
        for tok in label.split():
            m = re.fullmatch(r"([XYZI])(\d+)", tok)
            if not m:
                raise PauliError(f"bad Pauli token {tok!r}")
            q = int(m.group(2))
            if q >= n_qubits:
                raise PauliError(f"qubit {q} outside {n_qubits}-qubit register")
            bit = 1 << q
            if m.group(1) in "XY":
                x |= bit
            if m.group(1) in "ZY":
                z |= bit
        return cls(n_qubits, x, z, complex(coefficient))

    @property
    def key(self) -> tuple[int, int]:
        return self.x_mask, self.z_mask

    def label(self) -> str:
        ops = []
        for q in range(self.n_qubits):
            xb, zb = (self.x_mask >> q) & 1, (self.z_mask >> q) & 1
            if xb and zb:
                ops.append(f"Y{q}")
            elif xb:
                ops.append(f"X{q}")
            elif zb:
                ops.append(f"Z{q}")
        return " ".join(ops)

    def __str__(self) -> str:
        c = complex(self.coefficient)
        return f"({c.real:.17g}{c.imag:+.17g}j) {self.label()}".rstrip()

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> PauliString:
        m = re.fullmatch(r"\s*\(([^)]*)\)\s*(.*?)\s*", text)
        if not m:
            raise PauliError(f"cannot parse Pauli string {text!r}")
        return cls.from_label(m.group(2), n_qubits, complex(m.group(1).replace(" ", "")))

    def to_matrix(self) -> np.ndarray:
        single = {
            (0, 0): np.eye(2),
            (1, 0): np.array([[0, 1], [1, 0]]),
            (1, 1): np.array([[0, -1j], [1j, 0]]),
            (0, 1): np.diag([1, -1]),
        }
        mat = np.ones((1, 1), dtype=complex)
        # qubit 0 is the least significant bit of the basis index
        for q in reversed(range(self.n_qubits)):
            mat = np.kron(mat, single[(self.x_mask >> q) & 1, (self.z_mask >> q) & 1])
        return self.coefficient * mat


def pauli_product(a: PauliString, b: PauliString) -> PauliString:
    if a.n_qubits != b.n_qubits:
        raise PauliError("Pauli strings act on different register sizes")
    phase = _product_phase(a.x_mask, a.z_mask, b.x_mask, b.z_mask)
    return PauliString(
        a.n_qubits, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask, phase * a.coefficient * b.coefficient
    )


def strings_commute(a: PauliString, b: PauliString) -> bool:
    if a.n_qubits != b.n_qubits:
        raise PauliError("Pauli strings act on different register sizes")
    return _popcount((a.x_mask & b.z_mask) ^ (a.z_mask & b.x_mask)) % 2 == 0


class PauliSum:
    """Collected sum of Pauli strings keyed by (x_mask, z_mask)."""

    __slots__ = ("n_qubits", "terms")

    def __init__(self, n_qubits: int, terms: dict[tuple[int, int], complex] | None = None):
        self.n_qubits = n_qubits
        self.terms = {k: complex(v) for k, v in (terms or {}).items() if abs(v) >= COEFF_ATOL}

    @classmethod
    def from_strings(cls, strings: Iterable[PauliString], n_qubits: int | None = None) -> PauliSum:
        strings = list(strings)
        if n_qubits is None:
            if not strings:
                raise PauliError("cannot infer register size of an empty sum")
            n_qubits = strings[0].n_qubits
        acc: dict[tuple[int, int], complex] = {}
        for s in strings:
            if s.n_qubits != n_qubits:
                raise PauliError("mixed register sizes")
            acc[s.key] = acc.get(s.key, 0) + s.coefficient
        return cls(n_qubits, acc)

    @classmethod
    def identity(cls, n_qubits: int, coefficient: complex = 1.0) -> PauliSum:
        return cls(n_qubits, {(0, 0): coefficient})

    def __iter__(self) -> Iterator[PauliString]:
        for (x, z), c in self.terms.items():
            yield PauliString(self.n_qubits, x, z, c)

    def __len__(self) -> int:
        return len(self.terms)

    def _check(self, other: PauliSum):
        if self.n_qubits != other.n_qubits:
            raise PauliError("Pauli sums act on different register sizes")

    def __add__(self, other: PauliSum) -> PauliSum:
        self._check(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return PauliSum(self.n_qubits, acc)

    def __neg__(self) -> PauliSum:
        return PauliSum(self.n_qubits, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: PauliSum) -> PauliSum:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            self._check(other)
            acc: dict[tuple[int, int], complex] = {}
            for (x1, z1), c1 in self.terms.items():
                for (x2, z2), c2 in other.terms.items():
                    key = (x1 ^ x2, z1 ^ z2)
                    acc[key] = acc.get(key, 0) + _product_phase(x1, z1, x2, z2) * c1 * c2
            return PauliSum(self.n_qubits, acc)
        return PauliSum(self.n_qubits, {k: v * other for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and not (self - other).terms

    def allclose(self, other: PauliSum, atol: float = 1e-12) -> bool:
        self._check(other)
        diff = self - other
        return all(abs(v) <= atol for v in diff.terms.values())

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= atol for c in self.terms.values())

    def is_anti_hermitian(self, atol: float = 1e-12) -> bool:
        return all(abs(c.real) <= atol for c in self.terms.values())

    def one_norm(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for s in self:
            mat += s.to_matrix()
        return mat

    def __str__(self) -> str:
        return "\n".join(str(s) for s in sorted(self, key=lambda s: s.key))

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> PauliSum:
        strings = [PauliString.parse(line, n_qubits) for line in text.splitlines() if line.strip()]
        return cls.from_strings(strings, n_qubits)


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """[a, b]; only anticommuting string pairs contribute, each as 2ab."""
    a._check(b)
    acc: dict[tuple[int, int], complex] = {}
    for (x1, z1), c1 in a.terms.items():
        for (x2, z2), c2 in b.terms.items():
            if _popcount((x1 & z2) ^ (z1 & x2)) % 2 == 0:
                continue
            key = (x1 ^ x2, z1 ^ z2)
            acc[key] = acc.get(key, 0) + 2 * _product_phase(x1, z1, x2, z2) * c1 * c2
    return PauliSum(a.n_qubits, acc)


def sums_commute(a: PauliSum, b: PauliSum) -> bool:
    return not commutator(a, b).terms


def _ladder_image(index: int, dagger: bool, n_qubits: int) -> dict[tuple[int, int], complex]:
    z_string = (1 << index) - 1
    bit = 1 << index
    # X_p Z_<p carries masks (bit, z_string); Y_p Z_<p carries (bit, z_string | bit)
    return {(bit, z_string): 0.5, (bit, z_string | bit): (-0.5j if dagger else 0.5j)}


def jordan_wigner(op: FermionOperator, n_qubits: int) -> PauliSum:
    if op.max_index() >= n_qubits:
        raise PauliError(f"fermionic index {op.max_index()} does not fit {n_qubits} qubits")
    cache: dict[tuple[int, bool], dict[tuple[int, int], complex]] = {}
    acc: dict[tuple[int, int], complex] = {}
    for term, coeff in op.terms.items():
        partial: dict[tuple[int, int], complex] = {(0, 0): complex(coeff)}
        for ladder in term:
            image = cache.get(ladder)
            if image is None:
                image = cache[ladder] = _ladder_image(ladder[0], ladder[1], n_qubits)
            nxt: dict[tuple[int, int], complex] = {}
            for (x1, z1), c1 in partial.items():
                for (x2, z2), c2 in image.items():
                    key = (x1 ^ x2, z1 ^ z2)
                    nxt[key] = nxt.get(key, 0) + _product_phase(x1, z1, x2, z2) * c1 * c2
            partial = nxt
        for k, v in partial.items():
            acc[k] = acc.get(k, 0) + v
    return PauliSum(n_qubits, acc)
