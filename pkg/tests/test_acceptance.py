"""The ten acceptance criteria, each at its stated tolerance and time budget.

Every test prints one PASS/FAIL line; the lines are also collected and shown
together in the terminal summary.
"""
from pathlib import Path

import pytest

import conftest
from kdist.reproduce import CRITERIA, DEFAULT_SEED, run_criterion

FROZEN_ADEG = Path(__file__).parent / "data" / "adeg_or_1_8.cert"


def _extra(number: int) -> dict:
    if number == 6:
        return {"frozen": FROZEN_ADEG.read_text(encoding="utf-8")}
    return {}


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"c{c.number:02d}-{c.title.replace(' ', '-')}")
def test_criterion(criterion):
    outcome = run_criterion(criterion, DEFAULT_SEED, **_extra(criterion.number))
    line = outcome.line()
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    if not outcome.passed:
        for ln in outcome.report.lines():
            print("    " + ln)
    if criterion.number == 6:
        assert "certificate table matches the stored table" in outcome.report.verdicts()
    assert outcome.within_budget, f"over budget: {outcome.seconds:.1f}s > {criterion.budget}s"
    assert outcome.passed, "\n".join(outcome.report.lines())
