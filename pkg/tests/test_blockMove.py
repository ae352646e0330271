import numpy as np
import pytest
from scipy.stats import multivariate_normal
from quantord.blockMove import (
    BlockProposal, buildBlockProposal, findMode, finiteDifferenceHessian, independenceStep, projectSpd,
)
from quantord.distributions import RngState
from quantord.errors import NumericalError

MEAN = np.array([1.0, -2.0])
COV = np.array([[2.0, 0.6], [0.6, 0.5]])


def gaussianLogTarget(params):
    return float(multivariate_normal(MEAN, COV).logpdf(params))


def test_hessian_of_quadratic():
    hessian = finiteDifferenceHessian(gaussianLogTarget, np.array([0.3, 0.1]))
    assert np.allclose(hessian, -np.linalg.inv(COV), atol=1e-5)


def test_project_spd_lifts_negative_eigenvalues():
    fixed = projectSpd(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert np.all(np.linalg.eigvalsh(fixed) > 0)
    assert np.allclose(projectSpd(COV), COV)


def test_mode_and_curvature_of_gaussian():
    mode, cov = findMode(gaussianLogTarget, np.zeros(2))
    assert np.allclose(mode, MEAN, atol=1e-4)
    assert np.allclose(cov, COV, atol=1e-4)


def test_unbounded_target_has_no_mode(caplog):
    with pytest.raises(NumericalError):
        findMode(lambda params: float(np.sum(params)), np.zeros(2))
    assert buildBlockProposal(lambda params: float(np.sum(params)), np.zeros(2), "(a, b)") is None
    assert "Skipping the joint (a, b) move" in caplog.text


def test_proposal_rejects_bad_scale():
    with pytest.raises(NumericalError):
        BlockProposal(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NumericalError):
        BlockProposal(np.zeros(3), np.eye(2))


def test_proposal_draws_are_deterministic():
    proposal = BlockProposal(MEAN, COV)
    first = [proposal.draw(RngState(3)) for _ in range(2)]
    assert np.array_equal(first[0], first[1]) and first[0].shape == (2,)
    assert np.isfinite(proposal.logDensity(first[0]))


def test_exact_proposal_is_always_accepted():
    proposal = BlockProposal(MEAN, COV, df=5.0)
    rng = RngState(4)
    current = MEAN.copy()
    currentLog = proposal.logDensity(current)
    for _ in range(200):
        current, currentLog, accepted = independenceStep(proposal, current, currentLog, proposal.logDensity, rng)
        assert accepted


def test_candidates_without_mass_are_rejected():
    proposal = BlockProposal(MEAN, COV)
    params, logTarget, accepted = independenceStep(
        proposal, MEAN, -1.0, lambda params: -np.inf, RngState(5))
    assert not accepted and logTarget == -1.0 and np.array_equal(params, MEAN)


def test_independence_chain_targets_the_posterior():
    proposal = BlockProposal(np.array([0.5, -1.5]), 2.0 * np.eye(2), df=4.0)
    rng = RngState(6)
    current = np.zeros(2)
    currentLog = gaussianLogTarget(current)
    draws = np.empty((20000, 2))
    for i in range(draws.shape[0]):
        current, currentLog, _ = independenceStep(proposal, current, currentLog, gaussianLogTarget, rng)
        draws[i] = current
    draws = draws[1000:]
    assert np.allclose(draws.mean(axis=0), MEAN, atol=0.08)
    assert np.allclose(np.cov(draws.T), COV, atol=0.15)
