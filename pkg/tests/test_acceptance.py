"""One test per acceptance criterion; each prints a PASS/FAIL line, repeated in the terminal summary."""

import pytest

from conftest import ACCEPTANCE_LINES
from epwlab.acceptance import CRITERIA, determinism, run_criterion

_results = {}


def result(number):
    if number not in _results:
        if number == 12:
            _results[12] = determinism([result(k) for k in sorted(CRITERIA)])
        else:
            _results[number] = run_criterion(number)
        line = _results[number].line()
        print(line)
        ACCEPTANCE_LINES.append(line)
    return _results[number]


@pytest.mark.parametrize("number", list(range(1, 13)))
def test_criterion(number):
    r = result(number)
    assert r.passed, f"criterion {number} failed: {r.report}"
    assert r.within_budget, f"criterion {number} took {r.seconds:.1f}s, budget {r.budget:.0f}s"
