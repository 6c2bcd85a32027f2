"""Ordering ensembles, potential energy scans and their summary statistics.

Output files (JSON and CSV) hold only quantities fixed by the config and the
fixture bytes, so reruns are byte-identical; wall times go to separate
``*_timings.csv`` files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from ..ansatz import OrderingStrategy, build_pool, order_program, program_from_dict, set_trotter_number
from ..constants import HARTREE_TO_KCAL
from ..fci import dissociation_reference, fci_ground_energy, sector_basis
from ..integrals import FcidumpError, load_fcidump
from ..rng import substream_seed
from ..vqe import VQEProblem, VQEResult, minimize_bfgs, optimize_with_restarts, sgo_ordering, untrotterized
from .config import ConfigError, ExperimentConfig


class FixtureError(RuntimeError):
    pass


@lru_cache(maxsize=8)
def _load(path: str):
    p = Path(path)
    if not p.is_file():
        raise FixtureError(f"missing fixture {path}")
    try:
        ints = load_fcidump(p)
    except FcidumpError as exc:
        raise FixtureError(f"{path}: {exc}") from exc
    digest = hashlib.sha256(p.read_bytes()).hexdigest()
    return ints, VQEProblem.from_integrals(ints), digest


def load_problem(path: str):
    """(integrals, problem, sha256) for a fixture path, cached per process."""
    return _load(str(path))


def bond_length_of(path: str) -> float:
    m = re.search(r"_(\d+(?:\.\d+)?)\.fcidump$", Path(path).name)
    if m is None:
        raise ConfigError(f"cannot infer the bond length from fixture name {path}")
    return float(m.group(1))


def fci_energy(path: str) -> float:
    ints, problem, _ = load_problem(path)
    return fci_ground_energy(problem.hamiltonian, sector_basis(ints.n_qubits, ints.n_alpha, ints.n_beta))[0]


def _pool_for(config: ExperimentConfig, path: str):
    ints, _, _ = load_problem(path)
    return build_pool(config.ansatz, ints.n_spatial, ints.n_alpha, ints.n_beta, config.k)


def member_strategy(config: ExperimentConfig, member: int) -> OrderingStrategy:
    if config.ordering == "as_generated":
        return OrderingStrategy("as_generated")
    return OrderingStrategy(config.ordering, substream_seed(config.seed, member))


def member_program(config: ExperimentConfig, path: str, member: int):
    program = order_program(_pool_for(config, path), member_strategy(config, member))
    if config.trotter_n > 1:
        program = set_trotter_number(program, config.trotter_n)
    return program.with_form(config.form)


def _optimize(config: ExperimentConfig, program, problem, stream: int) -> VQEResult:
    best, _ = optimize_with_restarts(program, problem, config.restarts, config.init, stream, config.options)
    return best


@dataclass
class MemberRecord:
    member: int
    seed: int | None
    ordering: dict
    result: VQEResult

    def to_dict(self) -> dict:
        res = self.result.to_dict()
        res.pop("wall_time")
        return {"member": self.member, "seed": self.seed, "ordering": self.ordering, "result": res}


def _run_member(config: ExperimentConfig, path: str, member: int) -> MemberRecord:
    _, problem, _ = load_problem(path)
    program = member_program(config, path, member)
    result = _optimize(config, program, problem, substream_seed(config.seed, member, 1))
    return MemberRecord(member, program.strategy.seed, program.to_dict(), result)


def _run_member_args(args):
    return _run_member(*args)


def _map(fn, tasks: list, threads: int) -> list:
    """Ordered map, in-process or over a process pool."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


@dataclass
class Statistics:
    n: int
    mean: float
    std: float
    std_defined: bool
    minimum: float
    maximum: float
    n_nonconverged: int

    @property
    def range(self) -> float:
        return self.maximum - self.minimum

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "mean": self.mean,
            "std": self.std,
            "std_defined": self.std_defined,
            "min": self.minimum,
            "max": self.maximum,
            "range": self.range,
            "n_nonconverged": self.n_nonconverged,
        }
        for key in ("mean", "std", "min", "max", "range"):
            d[key + "_kcal"] = d[key] * HARTREE_TO_KCAL
        return d


def statistics(energies: Sequence[float], converged: Sequence[bool] | None = None) -> Statistics:
    """Sample statistics; std uses n - 1 and is reported as 0 (flagged) for one member."""
    e = np.asarray(energies, dtype=float)
    if e.size == 0:
        raise ValueError("statistics of an empty ensemble")
    n_bad = 0 if converged is None else sum(1 for c in converged if not c)
    std = float(np.std(e, ddof=1)) if e.size > 1 else 0.0
    return Statistics(int(e.size), float(np.mean(e)), std, e.size > 1, float(e.min()), float(e.max()), n_bad)


@dataclass
class EnsembleRecord:
    fixture: str
    fixture_sha256: str
    bond_length: float | None
    fci_energy: float
    members: list[MemberRecord]

    @property
    def energies(self) -> list[float]:
        return [m.result.energy for m in self.members]

    @property
    def stats(self) -> Statistics:
        return statistics(self.energies, [m.result.converged for m in self.members])

    def to_dict(self, config: ExperimentConfig) -> dict:
        return {
            "config": config.to_dict(),
            "fixture": self.fixture,
            "fixture_sha256": self.fixture_sha256,
            "bond_length": self.bond_length,
            "fci_energy": self.fci_energy,
            "summary": self.stats.to_dict(),
            "members": [m.to_dict() for m in self.members],
        }

    def members_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["member", "seed", "energy", "error_kcal", "converged", "iterations",
                    "final_gradient_norm", "n_evals", "generator_ids"])
        for m in self.members:
            r = m.result
            ids = " ".join(str(s["generator_id"]) for s in m.ordering["slots"])
            w.writerow([m.member, "" if m.seed is None else m.seed, repr(r.energy),
                        repr((r.energy - self.fci_energy) * HARTREE_TO_KCAL), int(r.converged),
                        r.iterations, repr(r.final_gradient_norm), r.n_evals, ids])
        return buf.getvalue()

    def timings_csv(self) -> str:
        rows = ["member,wall_time"] + [f"{m.member},{m.result.wall_time:.6f}" for m in self.members]
        return "\n".join(rows) + "\n"


def _tag(path: str) -> str:
    return Path(path).stem


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def dump_json(data) -> str:
    return json.dumps(data, indent=1, sort_keys=True, allow_nan=False) + "\n"


def run_ensemble(config: ExperimentConfig, fixture: str | None = None, write: bool = True) -> EnsembleRecord:
    """Optimize ``ensemble_size`` orderings of one fixture (the config's first by default)."""
    path = fixture if fixture is not None else config.fixtures[0]
    _, _, digest = load_problem(path)
    e_fci = fci_energy(path)
    tasks = [(config, path, m) for m in range(config.ensemble_size)]
    members = _map(_run_member_args, tasks, config.threads)
    try:
        r = bond_length_of(path)
    except ConfigError:
        r = None
    record = EnsembleRecord(str(path), digest, r, e_fci, members)
    if write:
        out = Path(config.out)
        write_text(out / f"ensemble_{_tag(path)}.json", dump_json(record.to_dict(config)))
        write_text(out / f"ensemble_{_tag(path)}.csv", record.members_csv())
        write_text(out / f"ensemble_{_tag(path)}_timings.csv", record.timings_csv())
    return record


def replay_member(record_member: dict, fixture: str, options=None) -> VQEResult:
    """Re-load a serialized ordering and re-optimize it from zero parameters."""
    _, problem, _ = load_problem(fixture)
    program = program_from_dict(record_member["ordering"])
    kwargs = {} if options is None else {"opts": options}
    return minimize_bfgs(program, np.zeros(program.n_params), problem, **kwargs)


SCAN_COLUMNS = [
    "bond_length", "fci", "untrotterized", "ens_mean", "ens_std", "ens_min", "ens_max", "ens_range",
    "ens_n", "ens_nonconverged", "sgo",
]
_ENERGY_COLUMNS = ["fci", "untrotterized", "ens_mean", "ens_min", "ens_max", "sgo"]
SCAN_HEADER = (
    SCAN_COLUMNS
    + [c + "_rel_kcal" for c in _ENERGY_COLUMNS]
    + [c + "_err_kcal" for c in _ENERGY_COLUMNS]
    + ["ens_std_kcal", "ens_range_kcal"]
)


@dataclass
class ScanPoint:
    bond_length: float
    fixture: str
    fixture_sha256: str
    fci: float
    untrotterized: float | None
    ensemble: EnsembleRecord
    sgo: float | None
    sgo_ordering: list[int] | None


@dataclass
class ScanTable:
    points: list[ScanPoint]
    dissociation: float

    def rows(self) -> list[dict]:
        out = []
        for p in self.points:
            s = p.ensemble.stats
            row = {
                "bond_length": p.bond_length,
                "fci": p.fci,
                "untrotterized": p.untrotterized,
                "ens_mean": s.mean,
                "ens_std": s.std,
                "ens_min": s.minimum,
                "ens_max": s.maximum,
                "ens_range": s.range,
                "ens_n": s.n,
                "ens_nonconverged": s.n_nonconverged,
                "sgo": p.sgo,
            }
            for c in _ENERGY_COLUMNS:
                v = row[c]
                row[c + "_rel_kcal"] = None if v is None else (v - self.dissociation) * HARTREE_TO_KCAL
                row[c + "_err_kcal"] = None if v is None else (v - p.fci) * HARTREE_TO_KCAL
            row["ens_std_kcal"] = s.std * HARTREE_TO_KCAL
            row["ens_range_kcal"] = s.range * HARTREE_TO_KCAL
            out.append(row)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_HEADER)
        for row in self.rows():
            w.writerow(["" if row[c] is None else repr(row[c]) for c in SCAN_HEADER])
        return buf.getvalue()

    def to_dict(self, config: ExperimentConfig) -> dict:
        return {
            "config": config.to_dict(),
            "dissociation_reference": self.dissociation,
            "points": [
                {
                    "bond_length": p.bond_length,
                    "fixture": p.fixture,
                    "fixture_sha256": p.fixture_sha256,
                    "sgo_ordering": p.sgo_ordering,
                    **{k: v for k, v in row.items() if k != "bond_length"},
                }
                for p, row in zip(self.points, self.rows())
            ],
        }


def _scan_extras(args):
    config, path = args
    _, problem, _ = load_problem(path)
    unt = None
    if config.untrotterized_reference:
        program = untrotterized(order_program(_pool_for(config, path), OrderingStrategy()))
        unt = _optimize(config, program, problem, substream_seed(config.seed, 2**32)).energy
    sgo = sgo_ids = None
    if config.sgo:
        program, _, res = sgo_ordering(_pool_for(config, path), problem, config.options)
        sgo, sgo_ids = res.energy, [s.generator_id for s in program.slots]
    return unt, sgo, sgo_ids


def run_scan(config: ExperimentConfig, grid: Sequence[float] | None = None, write: bool = True) -> ScanTable:
    """One row per fixture (optionally restricted to ``grid`` bond lengths), sorted by R."""
    by_r = {}
    for path in config.fixtures:
        by_r[bond_length_of(path)] = path
    if grid is not None:
        missing = [r for r in grid if r not in by_r]
        if missing:
            raise FixtureError("no fixture for bond length(s) " + ", ".join(f"{r:g}" for r in missing))
        by_r = {r: by_r[r] for r in grid}
    missing = [p for p in by_r.values() if not Path(p).is_file()]
    if missing:
        raise FixtureError("missing fixture(s): " + ", ".join(missing))
    order = sorted(by_r)
    extras = _map(_scan_extras, [(config, by_r[r]) for r in order], config.threads)
    points = []
    for r, (unt, sgo, sgo_ids) in zip(order, extras):
        path = by_r[r]
        ens = run_ensemble(config, path, write=write)
        points.append(ScanPoint(r, path, ens.fixture_sha256, ens.fci_energy, unt, ens, sgo, sgo_ids))
    table = ScanTable(points, dissociation_reference([(p.bond_length, p.fci) for p in points]))
    if write:
        out = Path(config.out)
        write_text(out / "scan.csv", table.to_csv())
        write_text(out / "scan.json", dump_json(table.to_dict(config)))
    return table


SUMMARY_HEADER = ["label", "n", "mean", "std", "std_defined", "min", "max", "range", "n_nonconverged",
                  "mean_kcal", "std_kcal", "min_kcal", "max_kcal", "range_kcal"]


def summarize(records: Sequence[EnsembleRecord], out: str | Path | None = None) -> list[dict]:
    """mean/std/min/max/range per record; optionally written as summary.csv and summary.json."""
    if not records:
        raise ValueError("nothing to summarize")
    table = []
    for rec in records:
        row = {"label": Path(rec.fixture).stem, **rec.stats.to_dict()}
        table.append(row)
    if out is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for row in table:
            w.writerow([row[c] if isinstance(row[c], (str, bool, int)) else repr(row[c]) for c in SUMMARY_HEADER])
        write_text(Path(out) / "summary.csv", buf.getvalue())
        write_text(Path(out) / "summary.json", dump_json(table))
    return table
