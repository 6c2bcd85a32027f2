"""Command line: ``uccorder <command> ...``.

Exit codes: 0 success, 2 config error, 3 fixture error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from ..ansatz import AnsatzError, OrderingStrategy, build_pool, order_program, set_trotter_number
from ..constants import HARTREE_TO_KCAL
from ..fci import fci_ground_energy, sector_basis
from ..integrals import FcidumpError, UnsupportedReferenceError, load_fcidump, rhf_energy
from ..statevector import ContractError, NumericalError
from ..vqe import VQEOptions, VQEProblem, minimize_bfgs, sgo_ordering
from .config import ConfigError, load_config
from .experiments import FixtureError, dump_json, run_ensemble, run_scan, summarize, write_text
from .plots import PlotError, PlotStyle, emit_plots

EXIT_OK, EXIT_CONFIG, EXIT_FIXTURE, EXIT_NUMERIC = 0, 2, 3, 4


def _load(path):
    try:
        ints = load_fcidump(path)
    except OSError as exc:
        raise FixtureError(f"cannot read {path}: {exc}") from exc
    except (FcidumpError, UnsupportedReferenceError) as exc:
        raise FixtureError(f"{path}: {exc}") from exc
    return ints, VQEProblem.from_integrals(ints)


def _emit(data, out: str | None, name: str):
    text = dump_json(data)
    if out:
        write_text(Path(out) / name, text)
    sys.stdout.write(text)


def cmd_inspect(args):
    ints, problem = _load(args.fcidump)
    basis = sector_basis(ints.n_qubits, ints.n_alpha, ints.n_beta)
    _emit(
        {
            "fcidump": args.fcidump,
            "n_spatial": ints.n_spatial,
            "n_electrons": ints.n_electrons,
            "ms2": ints.ms2,
            "n_qubits": ints.n_qubits,
            "core_energy": ints.core_energy,
            "rhf_energy": rhf_energy(ints),
            "pauli_terms": len(problem.hamiltonian.terms),
            "sector_dimension": basis.dim,
            "symmetry_violation": ints.symmetry_violation(),
        },
        args.out,
        "inspect.json",
    )


def cmd_fci(args):
    ints, problem = _load(args.fcidump)
    e, _ = fci_ground_energy(problem.hamiltonian, sector_basis(ints.n_qubits, ints.n_alpha, ints.n_beta))
    _emit({"fcidump": args.fcidump, "fci_energy": e, "rhf_energy": rhf_energy(ints)}, args.out, "fci.json")


def _options(args) -> VQEOptions:
    return VQEOptions(gtol=args.gtol, max_iter=args.max_iter)


def cmd_vqe(args):
    ints, problem = _load(args.fcidump)
    pool = build_pool(args.ansatz, ints.n_spatial, ints.n_alpha, ints.n_beta, args.k)
    seed = None if args.ordering == "as_generated" else (args.seed or 0)
    program = order_program(pool, OrderingStrategy(args.ordering, seed))
    if args.trotter_n > 1:
        program = set_trotter_number(program, args.trotter_n)
    program = program.with_form(args.form)
    result = minimize_bfgs(program, np.zeros(program.n_params), problem, _options(args))
    e_fci, _ = fci_ground_energy(problem.hamiltonian, sector_basis(ints.n_qubits, ints.n_alpha, ints.n_beta))
    res = result.to_dict()
    res.pop("wall_time")
    _emit(
        {"fcidump": args.fcidump, "ordering": program.to_dict(), "result": res,
         "fci_energy": e_fci, "error_kcal": (result.energy - e_fci) * HARTREE_TO_KCAL},
        args.out,
        "vqe.json",
    )


def cmd_sgo(args):
    ints, problem = _load(args.fcidump)
    pool = build_pool(args.ansatz, ints.n_spatial, ints.n_alpha, ints.n_beta, 1)
    program, trace, result = sgo_ordering(pool, problem, _options(args), reoptimize=not args.no_reoptimize)
    res = result.to_dict()
    res.pop("wall_time")
    _emit(
        {
            "fcidump": args.fcidump,
            "ordering": program.to_dict(),
            "trace": [{"generator_id": t.generator_id, "label": t.label, "score": t.score, "energy": t.energy}
                      for t in trace],
            "result": res,
        },
        args.out,
        "sgo.json",
    )


def _config(args):
    config = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["out"] = args.out
    if args.threads is not None:
        changes["threads"] = args.threads
    return config.with_(**changes)


def cmd_ensemble(args):
    config = _config(args)
    records = [run_ensemble(config, path) for path in config.fixtures]
    table = summarize(records, config.out)
    sys.stdout.write(dump_json(table))


def cmd_scan(args):
    config = _config(args)
    table = run_scan(config)
    sys.stdout.write(table.to_csv())


def cmd_plot(args):
    out = args.out or "."
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        paths = emit_plots(args.csv, out, PlotStyle(title=args.title))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    for p in paths:
        print(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uccorder", description="Operator-ordering experiments for Trotterized UCC ansatze.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None, help="worker processes")
        if seed:
            p.add_argument("--seed", type=int, default=None, help="64-bit base seed")

    def optimizer(p):
        p.add_argument("--gtol", type=float, default=1e-8)
        p.add_argument("--max-iter", type=int, default=10000)

    p = sub.add_parser("inspect", help="summarize an FCIDUMP file")
    p.add_argument("fcidump")
    common(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("fci", help="exact ground energy in the reference sector")
    p.add_argument("fcidump")
    common(p)
    p.set_defaults(func=cmd_fci)

    p = sub.add_parser("vqe", help="optimize one ordering")
    p.add_argument("fcidump")
    p.add_argument("--ansatz", choices=["uccsd", "kupccgsd"], default="uccsd")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--ordering", default="as_generated",
                   choices=["as_generated", "random_shuffle", "singles_first", "doubles_first"])
    p.add_argument("--form", choices=["trotterized", "untrotterized"], default="trotterized")
    p.add_argument("--trotter-n", type=int, default=1)
    common(p)
    optimizer(p)
    p.set_defaults(func=cmd_vqe)

    p = sub.add_parser("sgo", help="build the sequential gradient ordering")
    p.add_argument("fcidump")
    p.add_argument("--ansatz", choices=["uccsd", "kupccgsd"], default="uccsd")
    p.add_argument("--no-reoptimize", action="store_true", help="optimize only the newest parameter")
    common(p)
    optimizer(p)
    p.set_defaults(func=cmd_sgo)

    for name, func, text in (("ensemble", cmd_ensemble, "random-ordering ensembles"), ("scan", cmd_scan, "potential energy scan")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("plot", help="render scan CSV files as SVG")
    p.add_argument("csv", nargs="+")
    p.add_argument("--title", default="")
    common(p, seed=False)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        args.func(args)
    except (ConfigError, AnsatzError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FixtureError, FcidumpError, UnsupportedReferenceError, PlotError) as exc:
        print(f"fixture error: {exc}", file=sys.stderr)
        return EXIT_FIXTURE
    except (NumericalError, ContractError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
