"""Generator pools and ordered ansatz programs.

A program is applied to the reference slot by slot: slot 0 is the first
(rightmost) exponential to act. With Trotter number n the whole slot
sequence is applied n times, each factor with theta / n.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Sequence

from .fermion import (
    Generator,
    double_generator,
    generalized_single_generator,
    paired_double_generator,
    single_generator,
)
from .pauli import jordan_wigner
from .rng import SplitMix64

TROTTERIZED = "trotterized"
UNTROTTERIZED = "untrotterized"

ORDERING_KINDS = ("as_generated", "random_shuffle", "singles_first", "doubles_first", "sgo")


class AnsatzError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Pool:
    kind: str
    n_spatial: int
    n_alpha: int
    n_beta: int
    k: int
    generators: tuple[Generator, ...]

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial

    @property
    def n_blocks(self) -> int:
        return max((g.block for g in self.generators), default=0)

    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "n_spatial": self.n_spatial,
            "n_alpha": self.n_alpha,
            "n_beta": self.n_beta,
            "k": self.k,
        }

    @property
    def ref(self) -> str:
        payload = json.dumps(
            [self.descriptor(), [(g.id, g.block, g.label) for g in self.generators]],
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def __len__(self) -> int:
        return len(self.generators)

    def __getitem__(self, gid: int) -> Generator:
        return self.generators[gid]


def _finish(kind, n_spatial, n_alpha, n_beta, k, gens: Sequence[Generator]) -> Pool:
    n_qubits = 2 * n_spatial
    done = []
    for gid, g in enumerate(gens):
        done.append(g.with_(id=gid, pauli=jordan_wigner(g.fermionic, n_qubits)))
    return Pool(kind, n_spatial, n_alpha, n_beta, k, tuple(done))


def uccsd_pool(n_spatial: int, n_alpha: int, n_beta: int) -> Pool:
    """Spin-orbital UCCSD: Sz-conserving singles by (i, a), then doubles by (i, j, a, b)."""
    if n_alpha != n_beta:
        raise AnsatzError("UCCSD pools are built for RHF singlet references only")
    n_qubits = 2 * n_spatial
    occ = [p for p in range(n_qubits) if p // 2 < n_alpha]
    vir = [p for p in range(n_qubits) if p // 2 >= n_alpha]
    gens = [single_generator(i, a) for i in occ for a in vir if i % 2 == a % 2]
    for i, j in combinations(occ, 2):
        for a, b in combinations(vir, 2):
            if i % 2 + j % 2 == a % 2 + b % 2:
                gens.append(double_generator(i, j, a, b))
    return _finish("uccsd", n_spatial, n_alpha, n_beta, 1, gens)


def kupccgsd_pool(n_spatial: int, k: int, n_alpha: int = 0, n_beta: int = 0) -> Pool:
    """k blocks of paired doubles then spin-summed generalized singles, each lexicographic."""
    if k < 1:
        raise AnsatzError("k-UpCCGSD needs k >= 1")
    gens = []
    for block in range(1, k + 1):
        for p, q in combinations(range(n_spatial), 2):
            gens.append(paired_double_generator(p, q).with_(block=block))
        for p, q in combinations(range(n_spatial), 2):
            gens.append(generalized_single_generator(p, q).with_(block=block))
    return _finish("kupccgsd", n_spatial, n_alpha, n_beta, k, gens)


def sub_pool(pool: Pool, ids: Sequence[int]) -> Pool:
    """Pool of the given generators, renumbered 0..len(ids)-1 in the given order."""
    return _finish(pool.kind, pool.n_spatial, pool.n_alpha, pool.n_beta, pool.k, [pool[i] for i in ids])


def build_pool(kind: str, n_spatial: int, n_alpha: int, n_beta: int, k: int = 1) -> Pool:
    if kind == "uccsd":
        return uccsd_pool(n_spatial, n_alpha, n_beta)
    if kind == "kupccgsd":
        return kupccgsd_pool(n_spatial, k, n_alpha, n_beta)
    raise AnsatzError(f"unknown pool kind {kind!r}")


@dataclass(frozen=True)
class Slot:
    generator_id: int
    parameter_index: int
    block_id: int


@dataclass(frozen=True)
class OrderingStrategy:
    kind: str = "as_generated"
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ORDERING_KINDS:
            raise AnsatzError(f"unknown ordering kind {self.kind!r}")
        if self.kind in ("random_shuffle", "singles_first", "doubles_first") and self.seed is None:
            raise AnsatzError(f"ordering {self.kind} needs a seed")


@dataclass(frozen=True, eq=False)
class AnsatzProgram:
    pool: Pool
    slots: tuple[Slot, ...]
    trotter_n: int = 1
    form: str = TROTTERIZED
    strategy: OrderingStrategy = field(default_factory=OrderingStrategy)

    def __post_init__(self):
        params = sorted(s.parameter_index for s in self.slots)
        if params != list(range(len(params))):
            raise AnsatzError("parameter indices must cover 0..P-1 exactly once")
        blocks = [s.block_id for s in self.slots]
        if blocks != sorted(blocks):
            raise AnsatzError("slots cross block boundaries")
        if self.trotter_n < 1:
            raise AnsatzError("Trotter number must be >= 1")
        if self.form not in (TROTTERIZED, UNTROTTERIZED):
            raise AnsatzError(f"unknown form {self.form!r}")

    @property
    def n_params(self) -> int:
        return len(self.slots)

    @property
    def pool_ref(self) -> str:
        return self.pool.ref

    def generator(self, slot: Slot) -> Generator:
        return self.pool[slot.generator_id]

    def applied_factors(self) -> list[tuple[Generator, int, float]]:
        """(generator, parameter index, scale) in application order."""
        scale = 1.0 / self.trotter_n
        once = [(self.generator(s), s.parameter_index, scale) for s in self.slots]
        return once * self.trotter_n

    def blocks(self) -> list[list[Slot]]:
        out: dict[int, list[Slot]] = {}
        for s in self.slots:
            out.setdefault(s.block_id, []).append(s)
        return [out[b] for b in sorted(out)]

    def with_form(self, form: str) -> AnsatzProgram:
        return replace(self, form=form)

    def labels(self) -> list[str]:
        return [self.generator(s).label for s in self.slots]

    def to_dict(self) -> dict:
        return {
            "pool": self.pool.descriptor(),
            "pool_ref": self.pool_ref,
            "form": self.form,
            "trotter_n": self.trotter_n,
            "strategy": {"kind": self.strategy.kind, "seed": self.strategy.seed},
            "slots": [
                {
                    "generator_id": s.generator_id,
                    "parameter_index": s.parameter_index,
                    "block": s.block_id,
                    "label": self.generator(s).label,
                }
                for s in self.slots
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def program_from_dict(data: dict, pool: Pool | None = None) -> AnsatzProgram:
    desc = data["pool"]
    if pool is None:
        pool = build_pool(desc["kind"], desc["n_spatial"], desc["n_alpha"], desc["n_beta"], desc["k"])
    if pool.ref != data["pool_ref"]:
        raise AnsatzError("serialized program refers to a different pool")
    slots = []
    for s in data["slots"]:
        if pool[s["generator_id"]].label != s["label"]:
            raise AnsatzError(f"generator {s['generator_id']} label mismatch")
        slots.append(Slot(s["generator_id"], s["parameter_index"], s["block"]))
    strategy = OrderingStrategy(data["strategy"]["kind"], data["strategy"]["seed"])
    return AnsatzProgram(pool, tuple(slots), data["trotter_n"], data["form"], strategy)


def _is_single(g: Generator) -> bool:
    return g.rank in ("single", "generalized_single")


def order_program(pool: Pool, strategy: OrderingStrategy) -> AnsatzProgram:
    """Order a pool into a Trotterized program; parameter index = generator id.

    Shuffles never cross block boundaries. Every block of a k-UpCCGSD pool
    receives the same within-block permutation, so a seed names one
    ordering regardless of k.
    """
    if not pool.generators:
        raise AnsatzError("cannot order an empty pool")
    if strategy.kind == "sgo":
        raise AnsatzError("sequential gradient ordering needs energies; use vqe.sgo_ordering")
    by_block: dict[int, list[Generator]] = {}
    for g in pool.generators:
        by_block.setdefault(g.block, []).append(g)
    first = by_block[min(by_block)]
    positions = list(range(len(first)))
    if strategy.kind != "as_generated":
        rng = SplitMix64(strategy.seed)
        if strategy.kind == "random_shuffle":
            positions = rng.shuffle(positions)
        else:
            singles = [p for p in positions if _is_single(first[p])]
            doubles = [p for p in positions if not _is_single(first[p])]
            singles = rng.shuffle(singles)
            doubles = rng.shuffle(doubles)
            positions = singles + doubles if strategy.kind == "singles_first" else doubles + singles
    slots = []
    for block in sorted(by_block):
        gens = by_block[block]
        if len(gens) != len(first):
            raise AnsatzError("blocks of unequal size")
        for p in positions:
            slots.append(Slot(gens[p].id, gens[p].id, block))
    return AnsatzProgram(pool, tuple(slots), 1, TROTTERIZED, strategy)


def program_from_ids(pool: Pool, ids: Sequence[int], strategy: OrderingStrategy | None = None) -> AnsatzProgram:
    """Trotterized program applying ``ids`` in the given order; parameters follow that order."""
    slots = tuple(Slot(gid, k, pool[gid].block) for k, gid in enumerate(ids))
    return AnsatzProgram(pool, slots, 1, TROTTERIZED, strategy or OrderingStrategy())


def set_trotter_number(program: AnsatzProgram, n: int) -> AnsatzProgram:
    if n < 1:
        raise AnsatzError("Trotter number must be >= 1")
    if program.form != TROTTERIZED:
        raise AnsatzError("Trotter number applies to trotterized programs only")
    return replace(program, trotter_n=n)
