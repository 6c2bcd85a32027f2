import json
from pathlib import Path

import hypothesis
import numpy as np
import pytest

from uccorder.integrals import load_fcidump
from uccorder.vqe import VQEProblem

hypothesis.settings.register_profile("ci", max_examples=30, deadline=None)
hypothesis.settings.load_profile("ci")

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


def fixture_path(molecule: str, r: float) -> Path:
    return FIXTURES / molecule / f"{molecule}_{r:.4f}.fcidump"


def manifest() -> dict:
    return json.loads((FIXTURES / "manifest.json").read_text())


_problems = {}


def problem_for(molecule: str, r: float):
    key = (molecule, r)
    if key not in _problems:
        ints = load_fcidump(fixture_path(molecule, r))
        _problems[key] = (ints, VQEProblem.from_integrals(ints))
    return _problems[key]


@pytest.fixture(scope="session")
def h2():
    return problem_for("h2", 0.7414)


@pytest.fixture(scope="session")
def h4():
    return problem_for("h4", 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(8675309)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
