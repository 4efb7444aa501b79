import numpy as np
import pytest

from graphon_centrality import _kernels, presets

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session", autouse=True)
def _compile_kernels():
    # keep JIT compilation out of timed sections
    _kernels.warmup()


@pytest.fixture
def sbm():
    return presets.example_sbm()


@pytest.fixture
def fr():
    return presets.example_fr()


@pytest.fixture
def wg():
    return presets.example_wg()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance_log():
    def record(criterion, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {criterion}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
