"""Gibbs sampler with a random-walk Metropolis step for the variance-fixed ordinal model (J >= 4).

One sweep draws beta | z, w (normal), w | beta, z (GIG(1/2)), delta | beta marginally of
(z, w) by Metropolis-Hastings, then z | y, beta, gamma, w (truncated normal). Unless disabled,
the sweep ends with an independence move on (beta, delta) and an exact redraw of (z, w).
"""
from dataclasses import dataclass
import numpy as np
from scipy.linalg import cho_factor, cho_solve
from .blockMove import BlockProposal, buildBlockProposal, findMode, independenceStep, projectSpd
from .constants import Constants
from .diagnostics import Chain
from .distributions import QuantileSpec, RngState, sampleGigHalf, sampleMvn, sampleTruncatedAl, sampleTruncnorm
from .errors import ConfigError, DomainError, NumericalError
from .logManager import getLogger
from .modelCore import CutpointVector, OrdinalDataset, PriorSpec, gammaFromDelta, ordinalLogLik

logger = getLogger(__name__)

PROGRESS_EVERY = 100


@dataclass
class McmcConfig:
    iterations: int = Constants.ITERATIONS
    burnIn: int = Constants.BURN_IN
    seed: int = Constants.SEED
    iota: float = Constants.IOTA
    thin: int = Constants.THIN
    blockMove: bool = True

    def __post_init__(self):
        if self.iterations < 1 or self.burnIn < 0 or self.burnIn >= self.iterations:
            raise ConfigError(f"Burn-in ({self.burnIn}) must be smaller than iterations ({self.iterations}).")
        if self.thin < 1:
            raise ConfigError(f"Thinning interval must be at least 1, got {self.thin}.")
        if not self.iota > 0:
            raise ConfigError(f"Tuning scalar iota must be positive, got {self.iota}.")

    @property
    def storedCount(self) -> int:
        return (self.iterations - self.burnIn) // self.thin

    def keeps(self, sweep: int) -> bool:
        return sweep > self.burnIn and (sweep - self.burnIn) % self.thin == 0


@dataclass
class Or1State:
    beta: np.ndarray
    delta: np.ndarray
    w: np.ndarray
    z: np.ndarray


@dataclass(frozen=True)
class MhProposal:
    iota: float
    dhat: np.ndarray
    fallback: bool = False

    def __post_init__(self):
        dhat = np.atleast_2d(np.asarray(self.dhat, dtype=float))
        if not self.iota > 0:
            raise ConfigError("Proposal scale iota must be positive.")
        try:
            np.linalg.cholesky(dhat)
        except np.linalg.LinAlgError:
            raise NumericalError("Proposal matrix D-hat is not positive definite.", {"dhat": dhat.tolist()}) from None
        object.__setattr__(self, "dhat", dhat)

    @property
    def covariance(self) -> np.ndarray:
        return self.iota ** 2 * self.dhat


def betaPosterior(X, target, variances, prior: PriorSpec):
    weighted = X / variances[:, None]
    precision = weighted.T @ X + prior.betaPrecision
    try:
        factor = cho_factor(precision, lower=True)
    except np.linalg.LinAlgError:
        raise NumericalError(
            "Posterior precision of beta is not positive definite.",
            {"min_eigenvalue": float(np.min(np.linalg.eigvalsh(precision)))},
        ) from None
    cov = cho_solve(factor, np.eye(X.shape[1]))
    mean = cov @ (weighted.T @ target + prior.betaPrecision @ prior.betaMean)
    return mean, 0.5 * (cov + cov.T)


def intervalMidpoints(cuts: CutpointVector, y) -> np.ndarray:
    lo, hi = cuts.categoryBounds(y)
    return np.where(np.isinf(lo), hi - 1.0, np.where(np.isinf(hi), lo + 1.0, 0.5 * (lo + hi)))


class Or1Sampler:
    def __init__(self, data: OrdinalDataset, prior: PriorSpec, spec: QuantileSpec,
                 config: McmcConfig, rng: RngState | None = None):
        if data.J < 4:
            raise DomainError(f"The variance-fixed sampler needs at least 4 categories, got {data.J}.")
        if prior.betaMean.size != data.k or prior.deltaMean.size != data.J - 2:
            raise DomainError("Prior dimensions do not match the data.")
        self.data = data
        self.prior = prior
        self.spec = spec
        self.config = config
        self.rng = rng or RngState(config.seed)

    def initialState(self) -> Or1State:
        delta = np.zeros(self.data.J - 2)
        cuts = gammaFromDelta(delta, self.data.J)
        return Or1State(
            beta=np.zeros(self.data.k),
            delta=delta,
            w=np.ones(self.data.n),
            z=intervalMidpoints(cuts, self.data.y),
        )

    def logLik(self, beta, delta) -> float:
        try:
            cuts = gammaFromDelta(delta, self.data.J)
        except DomainError:
            return -np.inf
        return ordinalLogLik(beta, cuts, 1.0, self.spec, self.data)

    # beta | z, w
    def betaConditional(self, state: Or1State):
        theta, tau2 = self.spec.theta, self.spec.tau2
        return betaPosterior(self.data.X, state.z - theta * state.w, tau2 * state.w, self.prior)

    def stepBeta(self, state: Or1State) -> np.ndarray:
        mean, cov = self.betaConditional(state)
        return sampleMvn(mean, cov, self.rng)

    # w | beta, z
    def weightConditional(self, state: Or1State):
        spec = self.spec
        lam = ((state.z - self.data.X @ state.beta) / spec.tau) ** 2
        eta = spec.theta ** 2 / spec.tau2 + 2.0
        return lam, eta

    def stepW(self, state: Or1State) -> np.ndarray:
        lam, eta = self.weightConditional(state)
        return sampleGigHalf(lam, eta, self.rng)

    def computeProposal(self, betaInit=None, deltaInit=None) -> MhProposal:
        """Random-walk scale from the negative inverse Hessian at the joint (beta, delta) mode."""
        k, m = self.data.k, self.data.J - 2
        beta0 = np.zeros(k) if betaInit is None else np.asarray(betaInit, dtype=float)
        delta0 = np.zeros(m) if deltaInit is None else np.asarray(deltaInit, dtype=float)

        def fallback(reason: str) -> MhProposal:
            logger.warning(f"Using fallback proposal {Constants.FALLBACK_DHAT_SCALE:g}*I for delta: {reason}.")
            return MhProposal(self.config.iota, Constants.FALLBACK_DHAT_SCALE * np.eye(m), fallback=True)

        empty = [j + 1 for j, c in enumerate(self.data.categoryCounts()) if c == 0]
        if empty:
            return fallback(f"categories {empty} are empty, so the likelihood has no interior mode")

        try:
            _, cov = findMode(lambda params: self.logLik(params[:k], params[k:]), np.concatenate((beta0, delta0)))
        except NumericalError as e:
            return fallback(e.message)
        block = cov[k:, k:]
        if np.max(np.linalg.eigvalsh(0.5 * (block + block.T))) <= 0:
            return fallback("log-likelihood is not concave in delta at the mode")
        return MhProposal(self.config.iota, projectSpd(block))

    # delta | y, beta
    def logPosteriorDelta(self, beta, delta) -> float:
        value = self.logLik(beta, delta)
        if not np.isfinite(value):
            return -np.inf
        return value + self.prior.deltaLogDensity(delta)

    def stepDeltaMh(self, state: Or1State, proposal: MhProposal, currentLogPost: float | None = None):
        """Returns the new delta and whether the proposal was accepted."""
        m = state.delta.size
        candidate = state.delta + sampleMvn(np.zeros(m), proposal.covariance, self.rng)
        logU = np.log(self.rng.generator.uniform())
        if currentLogPost is None:
            currentLogPost = self.logPosteriorDelta(state.beta, state.delta)
        candidateLogPost = self.logPosteriorDelta(state.beta, candidate)

        if np.isfinite(candidateLogPost) and logU < min(0.0, candidateLogPost - currentLogPost):
            return candidate, True
        return state.delta.copy(), False

    # z | y, beta, gamma, w
    def latentConditional(self, state: Or1State):
        cuts = gammaFromDelta(state.delta, self.data.J)
        lo, hi = cuts.categoryBounds(self.data.y)
        mean = self.data.X @ state.beta + self.spec.theta * state.w
        return lo, hi, mean, self.spec.tau2 * state.w

    def stepZ(self, state: Or1State) -> np.ndarray:
        lo, hi, mean, var = self.latentConditional(state)
        return sampleTruncnorm(lo, hi, mean, var, self.rng)

    # (beta, delta) | y, with (w, z) integrated out
    def logPosterior(self, params) -> float:
        k = self.data.k
        value = self.logLik(params[:k], params[k:])
        if not np.isfinite(value):
            return -np.inf
        return value + self.prior.betaLogDensity(params[:k]) + self.prior.deltaLogDensity(params[k:])

    def computeBlockProposal(self) -> BlockProposal | None:
        return buildBlockProposal(self.logPosterior, np.zeros(self.data.k + self.data.J - 2), "(beta, delta)")

    def stepBlock(self, state: Or1State, proposal: BlockProposal):
        current = np.concatenate((state.beta, state.delta))
        params, _, accepted = independenceStep(proposal, current, self.logPosterior(current),
                                               self.logPosterior, self.rng)
        k = self.data.k
        return params[:k], params[k:], accepted

    # z | y, beta, gamma with w integrated out
    def stepZMarginal(self, state: Or1State) -> np.ndarray:
        lo, hi = gammaFromDelta(state.delta, self.data.J).categoryBounds(self.data.y)
        return sampleTruncatedAl(lo, hi, self.data.X @ state.beta, self.spec, self.rng)

    def logKernel(self, state: Or1State) -> float:
        """Complete-data log posterior kernel of (beta, delta, w, z) given y."""
        spec = self.spec
        if np.any(state.w <= 0):
            return -np.inf
        cuts = gammaFromDelta(state.delta, self.data.J)
        lo, hi = cuts.categoryBounds(self.data.y)
        if np.any((state.z <= lo) | (state.z > hi)):
            return -np.inf
        var = spec.tau2 * state.w
        resid = state.z - self.data.X @ state.beta - spec.theta * state.w
        return float(
            self.prior.betaLogDensity(state.beta)
            + self.prior.deltaLogDensity(state.delta)
            - np.sum(state.w)
            - 0.5 * np.sum(np.log(var) + resid ** 2 / var)
        )

    def run(self, progress=None) -> Chain:
        config = self.config
        data = self.data
        proposal = self.computeProposal()
        blockProposal = self.computeBlockProposal() if config.blockMove else None
        state = self.initialState()

        k, m = data.k, data.J - 2
        stored = np.empty((config.storedCount, k + m))
        logLikTrace = np.empty(config.storedCount)
        accepted = 0
        blockAccepted = 0
        slot = 0
        sweep = 0
        try:
            for sweep in range(1, config.iterations + 1):
                state.beta = self.stepBeta(state)
                state.w = self.stepW(state)
                state.delta, moved = self.stepDeltaMh(state, proposal)
                accepted += moved
                state.z = self.stepZ(state)
                if blockProposal is not None:
                    state.beta, state.delta, moved = self.stepBlock(state, blockProposal)
                    blockAccepted += moved
                    state.z = self.stepZMarginal(state)
                    state.w = self.stepW(state)

                if config.keeps(sweep) and slot < stored.shape[0]:
                    stored[slot, :k] = state.beta
                    stored[slot, k:] = state.delta
                    logLikTrace[slot] = self.logLik(state.beta, state.delta)
                    slot += 1
                if progress and (sweep % PROGRESS_EVERY == 0 or sweep == config.iterations):
                    progress(sweep, config.iterations, config.burnIn)
        except NumericalError as e:
            e.details["sweep"] = sweep
            raise

        names = [f"beta_{name}" for name in data.covariateNames] + [f"delta_{j + 1}" for j in range(m)]
        meta = {
            "model": "or1",
            "p": self.spec.p,
            "seed": config.seed,
            "iterations": config.iterations,
            "burn_in": config.burnIn,
            "thin": config.thin,
            "iota": config.iota,
            "k": k,
            "J": data.J,
            "dhat": proposal.dhat.tolist(),
            "dhat_fallback": proposal.fallback,
            "dhat_computed": "once, at the joint (beta, delta) likelihood mode",
            "anchor": Constants.CUTPOINT_ANCHOR,
            "block_move": blockProposal is not None,
            "block_acceptance_rate": blockAccepted / config.iterations if blockProposal is not None else None,
        }
        return Chain(stored, names, logLikTrace, accepted / config.iterations, meta)


def runOr1(data: OrdinalDataset, prior: PriorSpec, spec: QuantileSpec, config: McmcConfig,
           rng: RngState | None = None, progress=None) -> Chain:
    return Or1Sampler(data, prior, spec, config, rng).run(progress)
