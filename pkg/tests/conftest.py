import contextlib
import time

import numpy as np
import pytest

from prepotential import make_system

_ACCEPTANCE = []


@pytest.fixture
def harmonic():
    return make_system("harmonic", omega=1.0)


@pytest.fixture
def soliton():
    return make_system("poschl_teller", g=1.0)


@pytest.fixture
def calogero3():
    return make_system("calogero_a", N=3, omega=1.0, g=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20030808)


@pytest.fixture
def criterion():
    """Context manager recording one PASS/FAIL line per acceptance criterion."""

    @contextlib.contextmanager
    def record(label, budget=None):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            _ACCEPTANCE.append(f"FAIL  {label}  ({type(exc).__name__}: {exc})".splitlines()[0])
            raise
        elapsed = time.perf_counter() - start
        if budget is not None and elapsed > budget:
            _ACCEPTANCE.append(f"FAIL  {label}  (runtime {elapsed:.1f}s > {budget}s)")
            raise AssertionError(f"{label}: runtime {elapsed:.1f}s exceeds {budget}s")
        _ACCEPTANCE.append(f"PASS  {label}  ({elapsed:.2f}s)")

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
