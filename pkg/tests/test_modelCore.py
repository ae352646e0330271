import math
import numpy as np
import pytest
from quantord.distributions import QuantileSpec
from quantord.errors import DomainError, ParameterError
from quantord.modelCore import (
    CutpointVector, OrdinalDataset, PriorSpec, alLogLikContinuous, checkLoss, deltaFromGamma,
    gammaFromDelta, ordinalLogLik, outcomeProbMatrix, outcomeProbs,
)


def singleObservation(label, J=3):
    return OrdinalDataset(np.array([[1.0]]), np.array([label]), J)


def test_delta_from_gamma_study_cutpoints():
    delta = deltaFromGamma(CutpointVector.fromInterior([0.0, 2.0, 3.0])).delta
    assert np.allclose(delta, [math.log(2.0), 0.0])
    assert delta[0] == pytest.approx(0.693147, abs=1e-6)


def test_delta_from_unit_gaps_is_zero():
    assert np.allclose(deltaFromGamma(CutpointVector.fromInterior([0.0, 1.0, 2.0])).delta, 0.0)


def test_gamma_delta_round_trip():
    cuts = CutpointVector.fromInterior([0.0, 0.4, 1.9, 2.05])
    back = gammaFromDelta(deltaFromGamma(cuts), cuts.J)
    assert np.allclose(back.gamma[1:-1], cuts.interior, atol=1e-12)
    assert back.gamma[0] == -np.inf and back.gamma[-1] == np.inf


def test_gamma_from_delta_values():
    cuts = gammaFromDelta([0.693147, 0.0], 4)
    assert np.allclose(cuts.interior, [0.0, 2.0, 3.0], atol=1e-5)
    assert cuts.freeCount == 2


def test_gamma_from_delta_without_free_values():
    assert np.array_equal(gammaFromDelta([], 2).interior, [0.0])


def test_gamma_from_delta_dimension_mismatch():
    with pytest.raises(DomainError):
        gammaFromDelta([0.0], 4)


def test_gamma_from_delta_overflow_guard():
    cuts = gammaFromDelta([30.0, 1.0], 4)
    assert np.all(np.isfinite(cuts.interior))
    with pytest.raises(DomainError):
        gammaFromDelta([301.0, 0.0], 4)


def test_gamma_from_delta_is_increasing_for_random_delta():
    gen = np.random.default_rng(0)
    for _ in range(1000):
        delta = gen.normal(0.0, 3.0, size=gen.integers(1, 6))
        interior = gammaFromDelta(delta, delta.size + 2).interior
        assert np.all(np.diff(interior) > 0)


def test_cutpoints_must_increase():
    with pytest.raises(DomainError):
        CutpointVector.fromInterior([0.0, 0.0])
    with pytest.raises(DomainError):
        CutpointVector(np.array([-np.inf, 1.0, 0.5, np.inf]))


def test_category_bounds():
    cuts = CutpointVector.fixed([0.0, 4.0])
    lo, hi = cuts.categoryBounds([1, 2, 3])
    assert np.array_equal(lo, [-np.inf, 0.0, 4.0])
    assert np.array_equal(hi, [0.0, 4.0, np.inf])


def test_loglik_lowest_category(median):
    cuts = CutpointVector.fixed([0.0, 3.0])
    assert ordinalLogLik([0.0], cuts, 1.0, median, singleObservation(1)) == pytest.approx(math.log(0.5))


def test_loglik_highest_category(median):
    cuts = CutpointVector.fixed([0.0, 3.0])
    value = ordinalLogLik([0.0], cuts, 1.0, median, singleObservation(3))
    assert value == pytest.approx(math.log(0.5 * math.exp(-1.5)))
    assert value == pytest.approx(-2.193147, abs=1e-6)


def test_loglik_probabilities_over_labels_sum_to_one():
    spec = QuantileSpec(0.3)
    cuts = CutpointVector.fixed([0.0, 0.7, 2.5])
    for beta in (-4.0, -0.3, 0.0, 1.2, 6.0):
        total = sum(math.exp(ordinalLogLik([beta], cuts, 1.3, spec, singleObservation(j, 4))) for j in range(1, 5))
        assert abs(total - 1.0) < 1e-12


def test_loglik_underflow_returns_sentinel(median):
    cuts = CutpointVector.fixed([0.0, 3.0])
    assert ordinalLogLik([5000.0], cuts, 1.0, median, singleObservation(1)) == -np.inf


def test_loglik_dimension_mismatch(median):
    cuts = CutpointVector.fixed([0.0, 3.0])
    with pytest.raises(DomainError):
        ordinalLogLik([0.0, 1.0], cuts, 1.0, median, singleObservation(1))
    with pytest.raises(DomainError):
        ordinalLogLik([0.0], CutpointVector.fixed([0.0, 1.0, 2.0]), 1.0, median, singleObservation(1))


def test_loglik_detects_anchor_shift(study1, median):
    beta = np.array([-1.0, 2.0, 2.0])
    anchored = gammaFromDelta([0.5, 0.0], 4)
    shifted = gammaFromDelta([0.5, 0.0], 4, anchor=0.4)
    assert ordinalLogLik(beta, anchored, 1.0, median, study1) != ordinalLogLik(beta, shifted, 1.0, median, study1)


def test_outcome_probs_closed_form(median):
    probs = outcomeProbs([1.0], [0.0], CutpointVector.fixed([0.0, 3.0]), 1.0, median)
    expected = [0.5, 0.5 - 0.5 * math.exp(-1.5), 0.5 * math.exp(-1.5)]
    assert np.allclose(probs, expected, atol=1e-12)
    assert np.allclose(probs, [0.5, 0.388435, 0.111565], atol=1e-6)


def test_outcome_probs_move_to_top_category(median):
    cuts = CutpointVector.fixed([0.0, 3.0])
    assert outcomeProbs([1.0], [200.0], cuts, 1.0, median)[-1] == pytest.approx(1.0)
    assert outcomeProbs([1.0], [-200.0], cuts, 1.0, median)[0] == pytest.approx(1.0)


def test_outcome_probs_normalized_for_random_inputs():
    gen = np.random.default_rng(1)
    for _ in range(1000):
        spec = QuantileSpec(gen.uniform(0.05, 0.95))
        cuts = gammaFromDelta(gen.normal(size=3), 5)
        probs = outcomeProbs(gen.normal(size=2), gen.normal(0, 3, size=2), cuts, gen.uniform(0.2, 5), spec)
        assert np.all(probs >= 0)
        assert abs(probs.sum() - 1.0) < 1e-12


def test_outcome_prob_matrix_rows(median):
    X = np.array([[1.0, 0.0], [1.0, 2.0]])
    cuts = CutpointVector.fixed([0.0, 1.0])
    matrix = outcomeProbMatrix(X, [0.2, -0.5], cuts, 2.0, median)
    assert np.allclose(matrix[1], outcomeProbs(X[1], [0.2, -0.5], cuts, 2.0, median))


def test_check_loss_values():
    assert checkLoss(0.0, 0.3) == 0.0
    assert checkLoss(1.0, 0.25) == pytest.approx(0.25)
    assert checkLoss(-1.0, 0.25) == pytest.approx(0.75)
    assert np.all(checkLoss(np.array([-2.0, 3.0]), 0.9) > 0)


@pytest.mark.parametrize("p", (0.1, 0.25, 0.5, 0.8))
def test_check_loss_minimizer_is_empirical_quantile(p):
    sample = np.random.default_rng(4).normal(size=41)
    grid = np.linspace(sample.min(), sample.max(), 20001)
    losses = [np.sum(checkLoss(sample - c, p)) for c in grid]
    best = grid[int(np.argmin(losses))]
    lower = np.quantile(sample, p, method="inverted_cdf")
    upper = np.quantile(sample, p, method="higher")
    step = grid[1] - grid[0]
    assert lower - step <= best <= upper + step


def test_al_likelihood_is_negative_check_loss():
    spec = QuantileSpec(0.3)
    residuals = np.array([-1.0, 0.5, 2.0])
    expected = 3 * math.log(0.21) - np.sum(checkLoss(residuals, 0.3))
    assert alLogLikContinuous(residuals, spec) == pytest.approx(expected)


def test_dataset_validation():
    with pytest.raises(DomainError):
        OrdinalDataset(np.ones((3, 1)), np.array([1, 2, 5]), 4)
    with pytest.raises(DomainError):
        OrdinalDataset(np.ones((1, 2)), np.array([1]), 2)
    with pytest.raises(DomainError):
        OrdinalDataset(np.array([[1.0], [np.nan]]), np.array([1, 2]), 2)


def test_dataset_warns_on_empty_category(caplog):
    data = OrdinalDataset(np.ones((3, 1)), np.array([1, 2, 4]), 4)
    assert data.n == 3 and data.k == 1
    assert "[3]" in caplog.text
    assert np.array_equal(data.categoryCounts(), [1, 1, 0, 1])


def test_prior_from_dict_scalar_shorthand():
    prior = PriorSpec.fromDict({"beta_cov": 10, "delta_cov": 0.5, "beta_mean": 1, "n0": 3}, 3, 4)
    assert np.array_equal(prior.betaCov, 10 * np.eye(3))
    assert np.array_equal(prior.deltaCov, 0.5 * np.eye(2))
    assert np.array_equal(prior.betaMean, np.ones(3))
    assert prior.sigmaShapeN0 == 3.0 and prior.sigmaRateD0 == 8.0


def test_prior_rejects_invalid_values():
    with pytest.raises(ParameterError):
        PriorSpec.fromDict({"beta_cov": [[1.0, 2.0], [2.0, 1.0]]}, 2, 4)
    with pytest.raises(ParameterError):
        PriorSpec.fromDict({"d0": 0}, 2, 4)
    with pytest.raises(ParameterError):
        PriorSpec.fromDict({"gamma": 1}, 2, 4)


def test_prior_defaults():
    prior = PriorSpec.defaults(3, 4)
    assert np.array_equal(prior.betaCov, np.eye(3))
    assert np.array_equal(prior.deltaCov, 0.25 * np.eye(2))
    assert prior.deltaLogDensity([0.0, 0.0]) > prior.deltaLogDensity([1.0, 1.0])
