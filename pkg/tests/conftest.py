import numpy as np
import pytest

from searchrank.google import google_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def g2():
    """Google matrix of the 2-node graph 0 -> 1 at alpha = 0.85."""
    return google_matrix(np.array([[0.0, 0.5], [1.0, 0.5]]), 0.85)


def random_google(rng, n, alpha=0.85):
    e = rng.random((n, n))
    e[rng.random((n, n)) < 0.5] = 0.0
    e[:, ~e.any(axis=0)] = 1.0
    e /= e.sum(axis=0)
    return google_matrix(e, alpha)


# Seed whose 32-node graph puts the marked set {2, 7, 13, 21} in the same
# tiers as the classic 32-node example: 2 a hub, 13 secondary, 7 and 21 residual.
EXAMPLE_SEED = 42
EXAMPLE_MARKED = (2, 7, 13, 21)


@pytest.fixture(scope="session")
def example32():
    from searchrank.netgen import generate_scale_free

    return generate_scale_free(32, EXAMPLE_SEED)


# One line per acceptance criterion, filled in by tests/test_acceptance.py.
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
