"""Acceptance criteria 1-9 at full settings.

Each test prints one PASS/FAIL line followed by its diagnostics, so
``pytest -s tests/test_acceptance.py`` reads like ``nfchan verify``.
The full module takes tens of minutes on one core.
"""

import pytest

from nfchan import acceptance as acc
from nfchan.experiments import correlation_ensemble

pytestmark = pytest.mark.slow


def _report(result):
    print()
    print(result.line())
    for d in result.details:
        print(f"    {d}")
    assert result.passed, result.line()


@pytest.fixture(scope="module")
def ensemble(va):
    # shared by criteria 2 and 3, as in the verify command
    return correlation_ensemble(va, va.seed)


def test_criterion_1_mean_attenuation(va):
    _report(acc.check_mean_attenuation(va, va.seed))


def test_criterion_2_gaussianity(va, ensemble):
    _report(acc.check_gaussianity(va, va.seed, ensemble=ensemble))


def test_criterion_3_spatial_correlation(va, ensemble):
    _report(acc.check_spatial_correlation(va, va.seed, ensemble=ensemble))


def test_criterion_4_length_power_law(va):
    _report(acc.check_length_power_law(va, va.seed))


def test_criterion_5_sinr_closed_form(vb):
    _report(acc.check_sinr_closed_form(vb, vb.seed))


def test_criterion_6_tradeoff(vb):
    _report(acc.check_tradeoff(vb, vb.seed))


def test_criterion_7_side_lobe_ratio(vb):
    _report(acc.check_smr(vb, vb.seed))


def test_criterion_8_sum_rate(vb):
    _report(acc.check_sum_rate(vb, vb.seed))


def test_criterion_9_unit_suites():
    _report(acc.check_unit_suites(seed=1))
