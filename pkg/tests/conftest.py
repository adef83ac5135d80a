import pytest

from mimo_gdof.gdof import GdofParams

ACCEPTANCE_LINES = []


@pytest.fixture
def record_acceptance():
    def _record(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


def grid(Ks, Ms, Ns, alphas):
    for K in Ks:
        for M in Ms:
            for N in Ns:
                for a in alphas:
                    yield GdofParams(K, M, N, a)
