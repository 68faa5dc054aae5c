"""
Tests for sensitivity, the Laplace and exponential mechanisms and the accountant.
"""
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from marginal_pgm.core.domain import Domain
from marginal_pgm.core.errors import BudgetExceededError, MechanismError
from marginal_pgm.core.factor import Factor
from marginal_pgm.core.mechanisms import (
    EXPONENTIAL,
    LAPLACE,
    PrivacyAccountant,
    as_fraction,
    exponential_select,
    laplace_measure,
    sensitivity,
)


@pytest.fixture
def counts():
    domain = Domain(("A", "B"), (2, 2))
    return Factor(domain, ("A", "B"), [40.0, 10.0, 20.0, 30.0])


# sensitivity

def test_sensitivity_examples():
    assert sensitivity(np.eye(4), 100) == pytest.approx(0.02)
    assert sensitivity(np.ones((1, 4)), 1) == pytest.approx(2.0)
    assert sensitivity(np.tril(np.ones((4, 4))), 1) == pytest.approx(8.0)


def test_sensitivity_errors():
    with pytest.raises(MechanismError):
        sensitivity(np.zeros((0, 3)), 10)
    with pytest.raises(MechanismError):
        sensitivity(np.eye(2), 0)


# laplace_measure

def test_noiseless_measurement_is_exact(counts):
    m = laplace_measure(counts, np.eye(4), 1.0, 100, np.random.default_rng(0), noiseless=True)
    np.testing.assert_array_equal(m.answer, [40.0, 10.0, 20.0, 30.0])
    assert m.mechanism == LAPLACE
    assert m.noise_scale == pytest.approx(2.0)


def test_seeded_measurements_repeat(counts):
    first = laplace_measure(counts, np.eye(4), 0.5, 100, np.random.default_rng(7))
    second = laplace_measure(counts, np.eye(4), 0.5, 100, np.random.default_rng(7))
    np.testing.assert_array_equal(first.answer, second.answer)
    assert first.epsilon == 0.5


def test_noise_scale_is_the_same_for_counts_and_proportions(counts):
    proportions = counts * (1.0 / counts.sum())
    on_counts = laplace_measure(counts, np.eye(4), 0.5, 100, np.random.default_rng(1))
    on_proportions = laplace_measure(proportions, np.eye(4), 0.5, 100, np.random.default_rng(1))
    assert on_counts.noise_scale == pytest.approx(4.0)
    assert on_proportions.noise_scale == pytest.approx(0.04)


def test_laplace_noise_has_the_calibrated_variance():
    domain = Domain(("A",), (1,))
    marginal = Factor(domain, ("A",), [50.0])
    epsilon = 0.5
    m = laplace_measure(marginal, np.ones((100_000, 1)), epsilon, 50, np.random.default_rng(2))
    b = 2.0 * 100_000 / epsilon
    assert m.noise_scale == pytest.approx(b)
    noise = m.answer - 50.0
    assert np.var(noise) == pytest.approx(2 * b * b, rel=0.03)
    assert abs(np.mean(noise)) <= 5 * b * np.sqrt(2.0 / noise.size)


def test_laplace_rejects_bad_arguments(counts):
    rng = np.random.default_rng(3)
    with pytest.raises(MechanismError):
        laplace_measure(counts, np.eye(4), 0.0, 100, rng)
    with pytest.raises(MechanismError):
        laplace_measure(counts, np.eye(3), 1.0, 100, rng)


# PrivacyAccountant

def test_accountant_adds_fractions_exactly(counts):
    accountant = PrivacyAccountant(1.0)
    rng = np.random.default_rng(4)
    for _ in range(10):
        laplace_measure(counts, np.eye(4), Fraction(1, 10), 100, rng, accountant)
    assert accountant.consumed == Fraction(1)
    assert accountant.remaining == 0
    assert len(accountant.measurements) == 10
    with pytest.raises(BudgetExceededError):
        accountant.spend(Fraction(1, 10**9), LAPLACE)


def test_accountant_report_and_float_budgets():
    accountant = PrivacyAccountant(0.3, non_private=True)
    accountant.spend(0.1, LAPLACE, ("A",), round=1)
    accountant.spend(0.2, EXPONENTIAL, round=1)
    assert accountant.consumed == as_fraction(0.3)
    report = accountant.report()
    assert report["non_private"] is True
    assert [e["mechanism"] for e in report["entries"]] == [LAPLACE, EXPONENTIAL]
    assert report["entries"][0]["clique"] == ["A"]
    assert report["consumed_exact"] == "3/10"


def test_accountant_validation():
    with pytest.raises(MechanismError):
        PrivacyAccountant(0)
    with pytest.raises(MechanismError):
        PrivacyAccountant(1.0).spend(-0.1, LAPLACE)


# exponential_select

def test_equal_scores_select_uniformly():
    rng = np.random.default_rng(5)
    draws = np.array([exponential_select(np.zeros(4), 1.0, 1.0, rng) for _ in range(100_000)])
    observed = np.bincount(draws, minlength=4)
    assert stats.chisquare(observed).pvalue > 1e-3


def test_large_epsilon_picks_the_best_score():
    rng = np.random.default_rng(6)
    for _ in range(20):
        assert exponential_select([1.0, 5.0, 2.0], 1000.0, 1.0, rng) == 1


def test_selection_odds_follow_the_score_gap():
    rng = np.random.default_rng(7)
    draws = np.array([exponential_select([0.0, 2.0], 1.0, 1.0, rng) for _ in range(100_000)])
    ratio = np.mean(draws == 1) / np.mean(draws == 0)
    assert ratio == pytest.approx(np.e, rel=0.05)


def test_exponential_spends_and_validates():
    accountant = PrivacyAccountant(1.0)
    exponential_select([1.0, 2.0], 0.25, 1.0, np.random.default_rng(8), accountant, round=3)
    assert accountant.consumed == Fraction(1, 4)
    assert accountant.ledger[0].round == 3
    with pytest.raises(MechanismError):
        exponential_select([], 1.0, 1.0, np.random.default_rng(8))
    with pytest.raises(MechanismError):
        exponential_select([1.0, np.nan], 1.0, 1.0, np.random.default_rng(8))
    with pytest.raises(MechanismError):
        exponential_select([1.0], 1.0, 0.0, np.random.default_rng(8))
