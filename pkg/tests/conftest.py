import functools

import numpy as np
import pytest

from cbslice import catalog
from cbslice.tube import TubeChart

_ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def tube_chart(name):
    return TubeChart(catalog.chart(name))


@functools.lru_cache(maxsize=None)
def slice_chart(name):
    return catalog.chart(name)


def subgroup_elements(chart, sub, count, seed):
    """exp of random elements of the subalgebra ``sub``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        xi = sub.columns @ rng.normal(size=sub.dim) * 2.0 if sub.dim else np.zeros(chart.group.dim)
        out.append(chart.group.exp(xi))
    return out


@pytest.fixture
def record():
    """Print and remember one PASS/FAIL line for an acceptance criterion."""

    def _record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
