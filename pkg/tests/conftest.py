import functools

import pytest

from oddlattice.bmw import SearchFilters, search_involutive
from oddlattice.complexes import build_odd, odd_automorphisms
from oddlattice.coxeter import RacgPresentation
from oddlattice.geometry import king_ball


@functools.lru_cache(maxsize=None)
def presentation(d):
    return RacgPresentation(build_odd(d))


@functools.lru_cache(maxsize=None)
def explicit_king(d, radius):
    return king_ball(presentation(d), radius)


@functools.lru_cache(maxsize=None)
def auts(d):
    return odd_automorphisms(d, presentation(d).L)


@functools.lru_cache(maxsize=None)
def alternating_fixtures(count=3, seed=1):
    f = SearchFilters(alternating_x=True, alternating_a=True, limit=count)
    return tuple(search_involutive(5, 5, f, seed=seed).found)


@pytest.fixture(scope="session")
def P3():
    return presentation(3)


@pytest.fixture(scope="session")
def P4():
    return presentation(4)


@pytest.fixture(scope="session")
def bmw_fixtures():
    return alternating_fixtures()


# acceptance criteria: number -> (passed, summary line)
ACCEPTANCE: dict = {}


def record_criterion(number: int, title: str, checks: dict) -> bool:
    """Print and store one PASS/FAIL line; ``checks`` maps a short name to a bool."""
    failed = [k for k, v in checks.items() if not v]
    status = "PASS" if not failed else "FAIL"
    line = f"criterion {number:2d} {status}: {title}"
    if failed:
        line += " [failed: " + ", ".join(failed) + "]"
    print(line)
    ACCEPTANCE[number] = (not failed, line)
    return not failed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n][1])
