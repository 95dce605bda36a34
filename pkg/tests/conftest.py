import numpy as np
import pytest

from decide.model import DecisionProblem, IdentificationPartition

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record(name: str, passed: bool, detail: str = "") -> None:
    """Log one acceptance criterion; the summary is printed at session end."""
    ACCEPTANCE_RESULTS.append((name, passed, detail))
    print(f"{'PASS' if passed else 'FAIL'} {name} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def p1():
    return DecisionProblem(["a", "b"], ["s0", "s1"], [[1, 0], [0, 1]])


@pytest.fixture
def p2():
    return DecisionProblem(["a", "b"], ["s0", "s1"], [[2, 2], [1, 1]])


@pytest.fixture
def p3():
    return DecisionProblem(["a", "b"], ["s0", "s1"], [[1, 0], [0, 2]])


@pytest.fixture
def p4():
    return DecisionProblem(["a", "b"], ["s0", "s1"], [[3, 1], [2, 0]])


def random_problem(rng, n_actions, n_states, integer=False):
    if integer:
        w = rng.integers(0, 4, size=(n_actions, n_states)).astype(float)
    else:
        w = rng.uniform(0, 1, size=(n_actions, n_states))
    return DecisionProblem(
        [f"c{i}" for i in range(n_actions)], [f"s{j}" for j in range(n_states)], w
    )


def random_partition(rng, n_states, max_blocks=None):
    k = rng.integers(1, (max_blocks or n_states) + 1)
    k = min(k, n_states)
    labels = rng.integers(0, k, size=n_states)
    labels[:k] = rng.permutation(k)  # every block nonempty
    rng.shuffle(labels)
    return IdentificationPartition([np.flatnonzero(labels == b) for b in range(k)], n_states)
