import numpy as np
import pytest

from mvdist.qmc import normalizer_cache


def equicorrelated(k, rho=0.5):
    return np.full((k, k), rho) + (1.0 - rho) * np.eye(k)


def random_spd(rng, k, eps=0.1):
    a = rng.normal(size=(k, k))
    return a @ a.T + eps * np.eye(k)


@pytest.fixture
def sigma3():
    return equicorrelated(3)


@pytest.fixture
def sigma2():
    return equicorrelated(2)


@pytest.fixture(autouse=True)
def _fresh_cache():
    normalizer_cache.clear()
    yield


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line and fail the test when the check does not hold."""

    def record(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        _CRITERIA.append((number, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
