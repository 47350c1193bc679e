import numpy as np
import pytest

from girgmotif.graph import SimpleGraph

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one summary line per acceptance criterion."""
    lines = request.config.stash[_LINES_KEY]

    def log(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((number, line))
        print(line)

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)


def random_host(rng: np.random.Generator, n: int, p: float) -> SimpleGraph:
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return SimpleGraph(n, iu[keep], ju[keep])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
