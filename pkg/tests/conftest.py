import numpy as np
import pytest

from freqlab.quadrature import build_ball_rule


@pytest.fixture(scope="session")
def rule2():
    return build_ball_rule(2)


@pytest.fixture(scope="session")
def rule3():
    return build_ball_rule(3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for i in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[i])
