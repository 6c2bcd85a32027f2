"""Experiment configuration files.

Configs are INI-style key = value files read with :mod:`configparser`::

    [experiment]
    fixtures = fixtures/h6/h6_0.9000.fcidump
               fixtures/h6/h6_2.0000.fcidump
    ansatz = uccsd          ; or kupccgsd
    k = 1
    form = trotterized      ; or untrotterized
    trotter_n = 1
    ordering = random_shuffle
    seed = 2024
    ensemble_size = 20
    sgo = false
    untrotterized_reference = true
    out = results/h6

    [optimizer]
    gtol = 1e-8
    max_iter = 10000
    c1 = 1e-4
    c2 = 0.9
    fd_step = 1e-5

    [restarts]
    count = 1
    init = zeros            ; or uniform
    low = -0.5
    high = 0.5

Every key is optional except ``fixtures``. Relative fixture paths are
resolved against the config file's directory.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..ansatz import ORDERING_KINDS, TROTTERIZED, UNTROTTERIZED
from ..vqe import InitSpec, VQEOptions


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    fixtures: tuple[str, ...]
    ansatz: str = "uccsd"
    k: int = 1
    form: str = TROTTERIZED
    trotter_n: int = 1
    ordering: str = "random_shuffle"
    seed: int = 0
    ensemble_size: int = 100
    sgo: bool = False
    untrotterized_reference: bool = True
    out: str = "results"
    options: VQEOptions = field(default_factory=VQEOptions)
    restarts: int = 1
    init: InitSpec = field(default_factory=InitSpec)
    threads: int = 1

    def __post_init__(self):
        if not self.fixtures:
            raise ConfigError("at least one fixture is required")
        if self.ansatz not in ("uccsd", "kupccgsd"):
            raise ConfigError(f"unknown ansatz {self.ansatz!r}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.form not in (TROTTERIZED, UNTROTTERIZED):
            raise ConfigError(f"unknown form {self.form!r}")
        if self.trotter_n < 1:
            raise ConfigError("trotter_n must be >= 1")
        if self.ordering not in ORDERING_KINDS or self.ordering == "sgo":
            raise ConfigError(f"ensemble ordering must be one of {ORDERING_KINDS[:-1]}, got {self.ordering!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.ensemble_size < 1:
            raise ConfigError("ensemble_size must be >= 1")
        if self.restarts < 1:
            raise ConfigError("restart count must be >= 1")
        if self.init.kind not in ("zeros", "uniform") or self.init.low > self.init.high:
            raise ConfigError(f"bad init distribution {self.init}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def with_(self, **changes) -> ExperimentConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        """Everything that influences numeric outputs (threads and out do not)."""
        o = self.options
        return {
            "fixtures": list(self.fixtures),
            "ansatz": self.ansatz,
            "k": self.k,
            "form": self.form,
            "trotter_n": self.trotter_n,
            "ordering": self.ordering,
            "seed": self.seed,
            "ensemble_size": self.ensemble_size,
            "sgo": self.sgo,
            "untrotterized_reference": self.untrotterized_reference,
            "optimizer": {"gtol": o.gtol, "max_iter": o.max_iter, "c1": o.c1, "c2": o.c2, "fd_step": o.fd_step},
            "restarts": {"count": self.restarts, "init": self.init.kind, "low": self.init.low, "high": self.init.high},
        }

    def to_text(self) -> str:
        d = self.to_dict()
        lines = ["[experiment]", "fixtures = " + "\n    ".join(d["fixtures"])]
        for key in ("ansatz", "k", "form", "trotter_n", "ordering", "seed", "ensemble_size"):
            lines.append(f"{key} = {d[key]}")
        lines.append(f"sgo = {str(self.sgo).lower()}")
        lines.append(f"untrotterized_reference = {str(self.untrotterized_reference).lower()}")
        lines.append(f"out = {self.out}")
        lines.append("")
        lines.append("[optimizer]")
        lines += [f"{k} = {v!r}" for k, v in d["optimizer"].items()]
        lines.append("")
        lines.append("[restarts]")
        lines += [f"{k} = {v}" for k, v in d["restarts"].items()]
        return "\n".join(lines) + "\n"


_EXPERIMENT_KEYS = {
    "fixtures", "ansatz", "k", "form", "trotter_n", "ordering", "seed",
    "ensemble_size", "sgo", "untrotterized_reference", "out", "threads",
}
_OPTIMIZER_KEYS = {"gtol", "max_iter", "c1", "c2", "fd_step"}
_RESTART_KEYS = {"count", "init", "low", "high"}


def _check_keys(section, allowed, name):
    extra = set(section) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(extra))}")


def parse_config(text: str, base_dir: str | Path = ".") -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    extra = set(parser.sections()) - {"experiment", "optimizer", "restarts"}
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(extra))}")
    if not parser.has_section("experiment"):
        raise ConfigError("missing [experiment] section")
    exp = parser["experiment"]
    opt = parser["optimizer"] if parser.has_section("optimizer") else {}
    rst = parser["restarts"] if parser.has_section("restarts") else {}
    _check_keys(exp, _EXPERIMENT_KEYS, "experiment")
    _check_keys(opt, _OPTIMIZER_KEYS, "optimizer")
    _check_keys(rst, _RESTART_KEYS, "restarts")
    base = Path(base_dir)
    fixtures = tuple(
        str(p if Path(p).is_absolute() else base / p) for p in exp.get("fixtures", "").split()
    )
    defaults = VQEOptions()
    try:
        options = VQEOptions(
            gtol=float(opt.get("gtol", defaults.gtol)),
            max_iter=int(opt.get("max_iter", defaults.max_iter)),
            c1=float(opt.get("c1", defaults.c1)),
            c2=float(opt.get("c2", defaults.c2)),
            fd_step=float(opt.get("fd_step", defaults.fd_step)),
        )
        init = InitSpec(rst.get("init", "zeros"), float(rst.get("low", -0.5)), float(rst.get("high", 0.5)))
        return ExperimentConfig(
            fixtures=fixtures,
            ansatz=exp.get("ansatz", "uccsd"),
            k=int(exp.get("k", 1)),
            form=exp.get("form", TROTTERIZED),
            trotter_n=int(exp.get("trotter_n", 1)),
            ordering=exp.get("ordering", "random_shuffle"),
            seed=int(exp.get("seed", 0)),
            ensemble_size=int(exp.get("ensemble_size", 100)),
            sgo=parser.getboolean("experiment", "sgo", fallback=False),
            untrotterized_reference=parser.getboolean("experiment", "untrotterized_reference", fallback=True),
            out=exp.get("out", "results"),
            options=options,
            restarts=int(rst.get("count", 1)),
            init=init,
            threads=int(exp.get("threads", 1)),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, path.parent)
