import functools

import pytest
from hypothesis import settings

from sturmzeros.spectral import DirichletProblem, solve_basis

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("repo")

POTENTIALS = ("0", "10*cos(4*x)", "25*(x-0.5)^2")


@functools.lru_cache(maxsize=None)
def cached_basis(source: str, n: int = 8, n_grid: int = 4096):
    """Solve once per potential; callers truncate to smaller sizes."""
    return solve_basis(DirichletProblem.from_source(source), n, n_grid)


@pytest.fixture(scope="session")
def basis_factory():
    return cached_basis


@pytest.fixture(scope="session")
def free_basis():
    return cached_basis("0")


ACCEPTANCE_LINES = []


def report_criterion(number: int, title: str, passed: bool, detail: str = ""):
    """Record one acceptance line for the terminal summary and return ``passed``."""
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0].rstrip("ab"))):
            terminalreporter.write_line(line)
