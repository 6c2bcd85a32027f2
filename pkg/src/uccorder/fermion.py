"""Fermionic ladder-operator algebra and UCC excitation generators.

A term is a tuple of ``(index, dagger)`` pairs read left to right, so
``((2, True), (0, False))`` is a+_2 a_0. Normal order puts creations left of
annihilations, each group in descending index order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from .constants import COEFF_ATOL

Term = tuple[tuple[int, bool], ...]


class InvalidGeneratorError(ValueError):
    pass


def _normal_order_term(term: Term, coeff: float) -> dict[Term, float]:
    out: dict[Term, float] = {}
    stack = [(list(term), coeff)]
    while stack:
        ops, c = stack.pop()
        vanished = False
        for i in range(1, len(ops)):
            for j in range(i, 0, -1):
                left, right = ops[j - 1], ops[j]
                if right[1] and not left[1]:
                    ops[j - 1], ops[j] = right, left
                    if left[0] == right[0]:
                        # a_p a+_p = 1 - a+_p a_p
                        stack.append((ops[: j - 1] + ops[j + 1 :], c))
                    c = -c
                elif right[1] == left[1]:
                    if right[0] == left[0]:
                        vanished = True
                        break
                    if right[0] > left[0]:
                        ops[j - 1], ops[j] = right, left
                        c = -c
            if vanished:
                break
        if not vanished:
            key = tuple(ops)
            out[key] = out.get(key, 0.0) + c
    return out


class FermionOperator:
    """Real linear combination of ladder-operator products."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Term, float] | None = None):
        clean: dict[Term, float] = {}
        for key, value in (terms or {}).items():
            key = tuple((int(i), bool(d)) for i, d in key)
            clean[key] = clean.get(key, 0.0) + float(value)
        self.terms = {k: v for k, v in clean.items() if abs(v) >= COEFF_ATOL}

    @classmethod
    def ladder(cls, *ops: tuple[int, bool], coeff: float = 1.0) -> FermionOperator:
        return cls({tuple(ops): coeff})

    @classmethod
    def constant(cls, value: float) -> FermionOperator:
        return cls({(): value})

    def __add__(self, other: FermionOperator) -> FermionOperator:
        merged = dict(self.terms)
        for k, v in other.terms.items():
            merged[k] = merged.get(k, 0.0) + v
        return FermionOperator(merged)

    def __neg__(self) -> FermionOperator:
        return FermionOperator({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: FermionOperator) -> FermionOperator:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            prod: dict[Term, float] = {}
            for ka, va in self.terms.items():
                for kb, vb in other.terms.items():
                    prod[ka + kb] = prod.get(ka + kb, 0.0) + va * vb
            return FermionOperator(prod)
        return FermionOperator({k: v * float(other) for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FermionOperator):
            return NotImplemented
        diff = (self - other).normal_order()
        return not diff.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, v in sorted(self.terms.items()):
            ops = " ".join(f"a{'+' if d else ''}_{i}" for i, d in key)
            parts.append(f"{v:+.12g} {ops}".rstrip())
        return " ".join(parts)

    def max_index(self) -> int:
        return max((i for key in self.terms for i, _ in key), default=-1)

    def normal_order(self) -> FermionOperator:
        out: dict[Term, float] = {}
        for key, value in self.terms.items():
            for k, v in _normal_order_term(key, value).items():
                out[k] = out.get(k, 0.0) + v
        return FermionOperator(out)

    def hermitian_conjugate(self) -> FermionOperator:
        return FermionOperator(
            {tuple((i, not d) for i, d in reversed(key)): v for key, v in self.terms.items()}
        )

    def is_zero(self) -> bool:
        return not self.normal_order().terms

    def is_hermitian(self) -> bool:
        return (self - self.hermitian_conjugate()).is_zero()

    def is_anti_hermitian(self) -> bool:
        return (self + self.hermitian_conjugate()).is_zero()

    def to_matrix(self, n_modes: int) -> np.ndarray:
        """Dense Fock-space matrix; basis index bit k is the occupation of mode k."""
        dim = 1 << n_modes
        mat = np.zeros((dim, dim))
        for key, coeff in self.terms.items():
            for col in range(dim):
                hit = apply_term_to_bitstring(key, col)
                if hit is not None:
                    sign, row = hit
                    mat[row, col] += sign * coeff
        return mat


def apply_term_to_bitstring(term: Term, state: int) -> tuple[int, int] | None:
    """Act with a ladder product on a basis determinant.

    Returns ``(sign, new_state)`` or None when the product annihilates the
    state. The sign is the parity of occupied modes below each acted-on mode,
    matching the Jordan-Wigner Z-string convention.
    """
    sign = 1
    for index, dagger in reversed(term):
        bit = 1 << index
        occupied = bool(state & bit)
        if occupied == dagger:
            return None
        if bin(state & (bit - 1)).count("1") & 1:
            sign = -sign
        state ^= bit
    return sign, state


@dataclass(frozen=True, eq=False)
class Generator:
    """Anti-Hermitian excitation operator ``sum(T - T+)`` with one shared parameter.

    ``components`` lists the excitation products T; they act on disjoint
    modes, so their exponentials commute.
    """

    rank: str
    labels: tuple[int, ...]
    components: tuple[Term, ...]
    id: int = -1
    block: int = 1
    pauli: object = field(default=None, repr=False)

    @property
    def fermionic(self) -> FermionOperator:
        op = FermionOperator()
        for comp in self.components:
            t = FermionOperator({comp: 1.0})
            op = op + t - t.hermitian_conjugate()
        return op

    @property
    def label(self) -> str:
        return f"{self.rank}{self.labels}"

    def with_(self, **changes) -> Generator:
        return replace(self, **changes)

    def is_single(self) -> bool:
        return self.rank in ("single", "generalized_single")


def _spin(p: int) -> int:
    return p & 1


def single_generator(i: int, a: int) -> Generator:
    """a+_a a_i - a+_i a_a on spin orbitals."""
    if i == a:
        raise InvalidGeneratorError("single excitation needs i != a")
    if _spin(i) != _spin(a):
        raise InvalidGeneratorError(f"spin mismatch between orbitals {i} and {a}")
    return Generator("single", (i, a), (((a, True), (i, False)),))


def double_generator(i: int, j: int, a: int, b: int) -> Generator:
    """a+_a a+_b a_j a_i - a+_i a+_j a_b a_a with i < j, a < b."""
    if not (i < j and a < b):
        raise InvalidGeneratorError("double excitation needs i < j and a < b")
    if {i, j} & {a, b}:
        raise InvalidGeneratorError(f"index collision in ({i},{j})->({a},{b})")
    if _spin(i) + _spin(j) != _spin(a) + _spin(b):
        raise InvalidGeneratorError(f"Sz not conserved in ({i},{j})->({a},{b})")
    return Generator(
        "double", (i, j, a, b), (((a, True), (b, True), (j, False), (i, False)),)
    )


def paired_double_generator(p: int, q: int) -> Generator:
    """Move the electron pair on spatial orbital q to p: a+_{pa} a+_{pb} a_{qb} a_{qa} - h.c."""
    if p == q:
        raise InvalidGeneratorError("paired double needs p != q")
    comp = ((2 * p, True), (2 * p + 1, True), (2 * q + 1, False), (2 * q, False))
    return Generator("paired_double", (p, q), (comp,))


def generalized_single_generator(p: int, q: int) -> Generator:
    """Spin-summed orbital rotation sum_s (a+_{ps} a_{qs} - a+_{qs} a_{ps}), p < q."""
    if p == q:
        raise InvalidGeneratorError("generalized single needs p != q")
    if p > q:
        raise InvalidGeneratorError("generalized single needs p < q")
    comps = tuple(((2 * p + s, True), (2 * q + s, False)) for s in (0, 1))
    return Generator("generalized_single", (p, q), comps)


def sum_operators(ops: Iterable[FermionOperator]) -> FermionOperator:
    total = FermionOperator()
    for op in ops:
        total = total + op
    return total
