import pytest

from kernelq import oracle
from kernelq.pgf import bimodal

# arrival laws of the numerical experiments: A = D_{2/30,6}, B = D_{2/5,1}
P_A, M_A = 2 / 30, 6
P_B, M_B = 2 / 5, 1


@pytest.fixture(scope="session")
def A():
    return bimodal(P_A, M_A)


@pytest.fixture(scope="session")
def B():
    return bimodal(P_B, M_B)


@pytest.fixture(scope="session")
def single_oracle(A):
    return oracle.stationary_1d(A, 1.0, 200, 1e-12)


@pytest.fixture(scope="session")
def priority_oracle(A, B):
    return oracle.stationary_2d_priority(A, B, 200, 1e-12)


@pytest.fixture(scope="session")
def tandem_oracle(A, B):
    return oracle.stationary_2d_tandem(A, B, 200, 1e-12)


ACCEPTANCE_LINES = []


class Criterion:
    """Collects named checks for one acceptance criterion."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.failures = []

    def check(self, ok, detail):
        if not ok:
            self.failures.append(detail)

    def finish(self):
        status = "PASS" if not self.failures else "FAIL"
        line = f"criterion {self.number:>2} {status}: {self.title}"
        if self.failures:
            line += " [" + "; ".join(self.failures) + "]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert not self.failures, line


@pytest.fixture
def criterion():
    made = []

    def make(number, title):
        made.append(Criterion(number, title))
        return made[-1]
    yield make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
