import pytest

from kdist.reproduce import (
    CRITERIA, composition_instances, crit_amplification, crit_correlation, crit_identities, run_suite, strict_ok,
)
from kdist.verdicts import CERTIFIED, FAILED, REGIME_ONLY, ClaimResult, Report


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_randomised_criteria_hold_for_other_seeds(seed):
    for fn in (crit_identities, crit_amplification, crit_correlation):
        rep = fn(seed=seed)
        assert strict_ok(rep), "\n".join(rep.lines())


def test_composition_generator_meets_the_instance_count():
    cases = composition_instances(11)
    assert len(cases) >= 10
    assert {eta for *_, eta in cases} == {0, 2}


def test_strict_ok_requires_expected_certificates():
    good = Report("x", [ClaimResult("a", CERTIFIED), ClaimResult("b", REGIME_ONLY, expected=REGIME_ONLY)])
    assert strict_ok(good)
    weak = Report("x", [ClaimResult("a", REGIME_ONLY, expected=CERTIFIED)])
    assert weak.ok and not strict_ok(weak)
    assert not strict_ok(Report("x", [ClaimResult("a", FAILED)]))


def test_parallel_run_matches_serial():
    serial = run_suite("upperbound", 5, jobs=1)
    parallel = run_suite("upperbound", 5, jobs=2)
    assert [o.criterion.number for o in serial] == [o.criterion.number for o in parallel] == [9, 10]
    assert [o.report.lines() for o in serial] == [o.report.lines() for o in parallel]


def test_registry_covers_every_criterion_once():
    assert [c.number for c in CRITERIA] == list(range(1, 11))
    with pytest.raises(ValueError):
        run_suite("nope")
