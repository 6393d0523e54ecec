import sys

import numpy as np
import pytest

from beliefnet import validate_influence, validate_profile

# six-person influence network and the three logic matrices of the
# five-topic simulation study
W_SIX = np.array([
    [0.2, 0, 0, 0, 0.8, 0],
    [0.5, 0.3, 0, 0, 0, 0.2],
    [0, 0.3, 0.1, 0, 0, 0.6],
    [0, 0, 0.85, 0.15, 0, 0],
    [0, 0, 0, 0.2, 0.8, 0],
    [0, 0, 0, 0, 0.5, 0.5],
])
C_HAT = np.array([
    [1, 0, 0, 0, 0],
    [-0.5, 0.5, 0, 0, 0],
    [-0.3, -0.6, 0.1, 0, 0],
    [0, -0.3, 0, 0.2, -0.5],
    [0, -0.5, 0, -0.2, 0.3],
])
C_BAR = np.array([
    [1, 0, 0, 0, 0],
    [-0.8, 0.2, 0, 0, 0],
    [-0.3, -0.1, 0.6, 0, 0],
    [0, -0.3, 0, 0.2, -0.5],
    [0, -0.5, 0, -0.2, 0.3],
])
C_TILDE = np.array([
    [1, 0, 0, 0, 0],
    [0.5, 0.5, 0, 0, 0],
    [-0.3, -0.1, 0.6, 0, 0],
    [0, -0.3, 0, 0.2, -0.5],
    [0, -0.5, 0, -0.2, 0.3],
])
# two-topic belief systems: privatisation follows (or opposes) importance
C_SPACE = np.array([[1, 0], [0.5, 0.5]])
C_SPACE_OPPOSED = np.array([[1, 0], [-0.5, 0.5]])

# seven-topic pattern with blocks {1,2,3}, {4}, {5,6}, {7} (0-based below);
# topic 5 depends on 3 and 6, topic 6 on 4 and 5, topic 7 on 6
SEVEN_TOPIC_EDGES = [(0, 2), (1, 0), (2, 1), (4, 2), (4, 5), (5, 3), (5, 4), (6, 5)]


def seven_topic_pattern():
    P = np.eye(7, dtype=bool)
    for p, q in SEVEN_TOPIC_EDGES:
        P[p, q] = True
    return P


@pytest.fixture
def net6():
    return validate_influence(W_SIX)


@pytest.fixture
def profile_first():
    return validate_profile([C_HAT] * 3 + [C_BAR] * 3)


@pytest.fixture
def profile_second():
    return validate_profile([C_TILDE] * 3 + [C_BAR] * 3)


@pytest.fixture
def x0_six():
    return np.random.default_rng(2019).uniform(-1, 1, 30)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in results:
        terminalreporter.write_line(mod.format_line(name, ok, detail))
