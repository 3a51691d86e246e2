import functools

import pytest

from latexp.construct import generate_beta, generate_bounded, generate_superexp
from latexp.exactreal import BetaSpec
from latexp.lattice import compute_minima

# criterion number -> list of (ok, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@functools.lru_cache(maxsize=None)
def beta_run(beta: str, depth: int):
    """Construction with tables to depth + 2 and its minima to ``depth``."""
    c = generate_beta(BetaSpec.parse(beta), depth + 2)
    seq, lat = compute_minima(c, depth)
    return c, seq, lat


@functools.lru_cache(maxsize=None)
def bounded_run(a: tuple, b: tuple, depth: int):
    c = generate_bounded(a, b, depth + 2)
    seq, lat = compute_minima(c, depth)
    return c, seq, lat


@functools.lru_cache(maxsize=None)
def superexp_run(depth: int):
    c = generate_superexp(depth + 2)
    seq, lat = compute_minima(c, depth)
    return c, seq, lat


@pytest.fixture(scope="session")
def run2():
    return beta_run("2", 8)


@pytest.fixture(scope="session")
def run32():
    return beta_run("3/2", 8)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        results = ACCEPTANCE[number]
        ok = all(r for r, _ in results)
        failures = [d for r, d in results if not r]
        detail = "; ".join(failures) if failures else "; ".join(d for _, d in results)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
