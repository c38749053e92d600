import numpy as np
import pytest

from lodm.poly import in_stability_region


def draw_stable_a(rng, p, low=-1.0, high=1.0):
    """Rejection sample from the box, keeping stable coefficient vectors."""
    while True:
        a = rng.uniform(low, high, p)
        if in_stability_region(a):
            return a


def draw_stable_ab(rng, pmax=4, qmax=4):
    p = int(rng.integers(1, pmax + 1))
    q = int(rng.integers(1, qmax + 1))
    return draw_stable_a(rng, p), rng.uniform(-1.0, 1.0, q)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def worked():
    """The non-identifiable order (2, 2) example sharing the root 0.5."""
    from lodm.models import LodmParams

    return LodmParams(0.1, (0.7, -0.1), (0.4, -0.2))



# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
