from functools import lru_cache

import numpy as np
import pytest

from simpspec.cells import sample_complex
from simpspec.operators import adjacency, centered_H
from simpspec.spectra import compressed_norm, operator_norm, spectrum_report

_CRITERIA = []


@lru_cache(maxsize=None)
def _adjacency_report(n, d, p, seed):
    return spectrum_report(adjacency(sample_complex(n, d, p, seed)))


@lru_cache(maxsize=None)
def _norms(n, d, p, seed):
    # only the two numbers are kept; H itself is several hundred MB at n = 140
    H = centered_H(sample_complex(n, d, p, seed))
    return operator_norm(H), compressed_norm(H)


@pytest.fixture(scope="session")
def adjacency_report():
    """Cached spectrum report of A for (n, d, p, seed); dense solves at n=100 are slow."""
    return _adjacency_report


@pytest.fixture(scope="session")
def h_norms():
    """Cached (||H||, ||PHP||) for (n, d, p, seed)."""
    return _norms


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record one acceptance line, echo it, and fail the test if it is a FAIL."""

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        _CRITERIA.append((number, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_CRITERIA):
        terminalreporter.write_line(line)
