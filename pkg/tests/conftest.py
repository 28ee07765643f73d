"""Shared fixtures and the acceptance-line reporter.

Acceptance tests register one line per criterion; the terminal summary hook
prints them after the run so the pass/fail lines survive output capturing.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from shiftlab.measures import DiscreteMeasure, split_measures
from shiftlab.walk import WalkConfig

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, name: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] criterion {number:2d} ({name}): {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line, flush=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def delta_pair():
    """mu = delta_0, nu = delta_1; the simplest exact orthogonal pair."""
    return split_measures(DiscreteMeasure.delta(0), DiscreteMeasure.delta(1))


@pytest.fixture(scope="session")
def symmetric_pair():
    """mu = delta_0, nu = (delta_-1 + delta_1)/2."""
    nu = DiscreteMeasure.from_atoms([(-1, Fraction(1, 2)), (1, Fraction(1, 2))])
    return split_measures(DiscreteMeasure.delta(0), nu)


@pytest.fixture()
def small_walk_cfg(delta_pair):
    return WalkConfig(dx=Fraction(1), horizon_fwd=256, horizon_bwd=64,
                      seed=7, start_law=delta_pair.mu)
