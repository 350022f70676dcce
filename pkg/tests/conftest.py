import sys
from pathlib import Path

import pytest

from qedentropy.basis import enumerate_states, paper_initial_support
from qedentropy.model import ModelParams, build_hamiltonian, paper_rules

sys.path.insert(0, str(Path(__file__).parent))

G = 1e7
_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line[1])


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash[_ACCEPTANCE]

    def report(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} -- {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return report


@pytest.fixture(scope="session")
def params():
    return ModelParams()


@pytest.fixture(scope="session")
def space():
    return enumerate_states(paper_initial_support(), paper_rules())


@pytest.fixture(scope="session")
def hamiltonian(params, space):
    return build_hamiltonian(params, space)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240501)
