"""Gibbs sampler for the three-category ordinal model with fixed cut-points and a free scale sigma.

The latent weights enter as nu = sigma * w, so every block has a standard full conditional:
beta (normal), sigma (inverse-gamma), nu (GIG(1/2)) and z (truncated normal). Unless disabled,
the sweep ends with an independence move on (beta, log sigma) and an exact redraw of (z, nu).
"""
from dataclasses import dataclass
import numpy as np
from scipy.stats import invgamma
from .blockMove import BlockProposal, buildBlockProposal, independenceStep
from .constants import Constants
from .diagnostics import Chain
from .distributions import (
    QuantileSpec, RngState, sampleGigHalf, sampleInvgamma, sampleMvn, sampleTruncatedAl, sampleTruncnorm,
)
from .errors import DomainError, NumericalError
from .modelCore import CutpointVector, OrdinalDataset, PriorSpec, ordinalLogLik
from .samplerOr1 import PROGRESS_EVERY, McmcConfig, betaPosterior, intervalMidpoints


@dataclass
class Or2State:
    beta: np.ndarray
    sigma: float
    nu: np.ndarray
    z: np.ndarray


class Or2Sampler:
    def __init__(self, data: OrdinalDataset, prior: PriorSpec, spec: QuantileSpec,
                 fixedCuts: CutpointVector | None, config: McmcConfig, rng: RngState | None = None):
        fixedCuts = fixedCuts or CutpointVector.fixed(Constants.OR2_CUTPOINTS)
        if data.J != 3:
            raise DomainError(f"The fixed cut-point sampler needs exactly 3 categories, got {data.J}.")
        if fixedCuts.J != 3:
            raise DomainError("Exactly two fixed cut-points are required.")
        if prior.betaMean.size != data.k:
            raise DomainError("Prior dimensions do not match the data.")
        self.data = data
        self.prior = prior
        self.spec = spec
        self.cuts = fixedCuts
        self.config = config
        self.rng = rng or RngState(config.seed)
        self._lo, self._hi = fixedCuts.categoryBounds(data.y)
        self._sigmaPrior = invgamma(prior.sigmaShapeN0 / 2.0, scale=prior.sigmaRateD0 / 2.0)

    def initialState(self) -> Or2State:
        return Or2State(
            beta=np.zeros(self.data.k),
            sigma=1.0,
            nu=np.ones(self.data.n),
            z=intervalMidpoints(self.cuts, self.data.y),
        )

    def logLik(self, beta, sigma) -> float:
        return ordinalLogLik(beta, self.cuts, sigma, self.spec, self.data)

    # beta | z, sigma, nu
    def betaConditional(self, state: Or2State):
        theta, tau2 = self.spec.theta, self.spec.tau2
        return betaPosterior(self.data.X, state.z - theta * state.nu, tau2 * state.sigma * state.nu, self.prior)

    def stepBeta(self, state: Or2State) -> np.ndarray:
        mean, cov = self.betaConditional(state)
        return sampleMvn(mean, cov, self.rng)

    # sigma | z, beta, nu
    def sigmaConditional(self, state: Or2State):
        spec = self.spec
        resid = state.z - self.data.X @ state.beta - spec.theta * state.nu
        shape = self.prior.sigmaShapeN0 + 3.0 * self.data.n
        rate = np.sum(resid ** 2 / (spec.tau2 * state.nu)) + self.prior.sigmaRateD0 + 2.0 * np.sum(state.nu)
        if not rate > 0:
            raise NumericalError("Inverse-gamma rate for sigma is not positive.", {"rate": float(rate)})
        return shape / 2.0, rate / 2.0

    def stepSigma(self, state: Or2State) -> float:
        shape, rate = self.sigmaConditional(state)
        return sampleInvgamma(shape, rate, self.rng)

    # nu | z, beta, sigma
    def weightConditional(self, state: Or2State):
        spec = self.spec
        lam = (state.z - self.data.X @ state.beta) ** 2 / (spec.tau2 * state.sigma)
        eta = spec.theta ** 2 / (spec.tau2 * state.sigma) + 2.0 / state.sigma
        return lam, eta

    def stepNu(self, state: Or2State) -> np.ndarray:
        lam, eta = self.weightConditional(state)
        return sampleGigHalf(lam, eta, self.rng)

    # z | y, beta, sigma, nu
    def latentConditional(self, state: Or2State):
        mean = self.data.X @ state.beta + self.spec.theta * state.nu
        return self._lo, self._hi, mean, self.spec.tau2 * state.sigma * state.nu

    def stepZ(self, state: Or2State) -> np.ndarray:
        lo, hi, mean, var = self.latentConditional(state)
        return sampleTruncnorm(lo, hi, mean, var, self.rng)

    # (beta, log sigma) | y, with (nu, z) integrated out
    def logPosterior(self, params) -> float:
        beta, logSigma = params[:-1], params[-1]
        if not abs(logSigma) < Constants.EXP_CLAMP:
            return -np.inf
        sigma = float(np.exp(logSigma))
        value = self.logLik(beta, sigma)
        if not np.isfinite(value):
            return -np.inf
        return float(value + self.prior.betaLogDensity(beta) + self._sigmaPrior.logpdf(sigma) + logSigma)

    def computeBlockProposal(self) -> BlockProposal | None:
        return buildBlockProposal(self.logPosterior, np.zeros(self.data.k + 1), "(beta, log sigma)")

    def stepBlock(self, state: Or2State, proposal: BlockProposal):
        current = np.append(state.beta, np.log(state.sigma))
        params, _, accepted = independenceStep(proposal, current, self.logPosterior(current),
                                               self.logPosterior, self.rng)
        if not accepted:
            return state.beta.copy(), state.sigma, False
        return params[:-1], float(np.exp(params[-1])), True

    # z | y, beta, sigma with nu integrated out
    def stepZMarginal(self, state: Or2State) -> np.ndarray:
        return sampleTruncatedAl(self._lo, self._hi, self.data.X @ state.beta, self.spec, self.rng,
                                 scale=state.sigma)

    def logKernel(self, state: Or2State) -> float:
        """Complete-data log posterior kernel of (beta, sigma, nu, z) given y."""
        spec = self.spec
        if state.sigma <= 0 or np.any(state.nu <= 0):
            return -np.inf
        if np.any((state.z <= self._lo) | (state.z > self._hi)):
            return -np.inf
        var = spec.tau2 * state.sigma * state.nu
        resid = state.z - self.data.X @ state.beta - spec.theta * state.nu
        return float(
            self.prior.betaLogDensity(state.beta)
            + self._sigmaPrior.logpdf(state.sigma)
            + np.sum(-np.log(state.sigma) - state.nu / state.sigma)
            - 0.5 * np.sum(np.log(var) + resid ** 2 / var)
        )

    def run(self, progress=None) -> Chain:
        config = self.config
        data = self.data
        blockProposal = self.computeBlockProposal() if config.blockMove else None
        state = self.initialState()

        k = data.k
        stored = np.empty((config.storedCount, k + 1))
        logLikTrace = np.empty(config.storedCount)
        blockAccepted = 0
        slot = 0
        sweep = 0
        try:
            for sweep in range(1, config.iterations + 1):
                state.beta = self.stepBeta(state)
                state.sigma = self.stepSigma(state)
                state.nu = self.stepNu(state)
                state.z = self.stepZ(state)
                if blockProposal is not None:
                    state.beta, state.sigma, moved = self.stepBlock(state, blockProposal)
                    blockAccepted += moved
                    state.z = self.stepZMarginal(state)
                    state.nu = self.stepNu(state)

                if config.keeps(sweep) and slot < stored.shape[0]:
                    stored[slot, :k] = state.beta
                    stored[slot, k] = state.sigma
                    logLikTrace[slot] = self.logLik(state.beta, state.sigma)
                    slot += 1
                if progress and (sweep % PROGRESS_EVERY == 0 or sweep == config.iterations):
                    progress(sweep, config.iterations, config.burnIn)
        except NumericalError as e:
            e.details["sweep"] = sweep
            raise

        names = [f"beta_{name}" for name in data.covariateNames] + ["sigma"]
        meta = {
            "model": "or2",
            "p": self.spec.p,
            "seed": config.seed,
            "iterations": config.iterations,
            "burn_in": config.burnIn,
            "thin": config.thin,
            "k": k,
            "J": data.J,
            "cutpoints": self.cuts.interior.tolist(),
            "block_move": blockProposal is not None,
            "block_acceptance_rate": blockAccepted / config.iterations if blockProposal is not None else None,
        }
        return Chain(stored, names, logLikTrace, None, meta)


def runOr2(data: OrdinalDataset, prior: PriorSpec, spec: QuantileSpec, fixedCuts: CutpointVector | None,
           config: McmcConfig, rng: RngState | None = None, progress=None) -> Chain:
    return Or2Sampler(data, prior, spec, fixedCuts, config, rng).run(progress)
