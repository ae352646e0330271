"""Mode search and the independence Metropolis-Hastings move on the parameter block.

The block move targets the posterior of the parameters with the latent data integrated out.
The samplers follow an accepted or rejected move with an exact redraw of the latent data, so
the pair leaves the joint posterior invariant.
"""
from dataclasses import dataclass, field
import numpy as np
from scipy.optimize import minimize
from scipy.stats import multivariate_t
from .constants import Constants
from .distributions import RngState
from .errors import NumericalError
from .logManager import getLogger

logger = getLogger(__name__)

MAX_MODE_MAGNITUDE = 50.0
GRADIENT_TOLERANCE = 1e-2


def projectSpd(matrix, floor: float = 1e-8) -> np.ndarray:
    sym = 0.5 * (matrix + matrix.T)
    values, vectors = np.linalg.eigh(sym)
    values = np.maximum(values, max(floor, floor * np.max(np.abs(values))))
    return (vectors * values) @ vectors.T


def finiteDifferenceHessian(func, point) -> np.ndarray:
    point = np.asarray(point, dtype=float)
    dim = point.size
    steps = Constants.HESSIAN_STEP * np.maximum(1.0, np.abs(point))
    center = func(point)
    hessian = np.empty((dim, dim))
    for i in range(dim):
        ei = np.zeros(dim)
        ei[i] = steps[i]
        hessian[i, i] = (func(point + ei) - 2.0 * center + func(point - ei)) / steps[i] ** 2
        for j in range(i):
            ej = np.zeros(dim)
            ej[j] = steps[j]
            value = (func(point + ei + ej) - func(point + ei - ej)
                     - func(point - ei + ej) + func(point - ei - ej)) / (4.0 * steps[i] * steps[j])
            hessian[i, j] = hessian[j, i] = value
    return hessian


def findMode(logTarget, start):
    """BFGS mode of ``logTarget`` and the negative inverse Hessian there.

    Raises NumericalError with a short reason when either cannot be trusted.
    """
    def objective(params):
        value = logTarget(params)
        return -value if np.isfinite(value) else 1e300

    result = minimize(objective, np.asarray(start, dtype=float), method="BFGS")
    mode = result.x
    converged = result.success or (
        np.all(np.isfinite(result.jac)) and np.max(np.abs(result.jac)) < GRADIENT_TOLERANCE)
    if not converged or not np.all(np.isfinite(mode)) or np.max(np.abs(mode)) > MAX_MODE_MAGNITUDE:
        raise NumericalError(f"optimizer did not converge ({result.message})")

    hessian = finiteDifferenceHessian(logTarget, mode)
    if not np.all(np.isfinite(hessian)):
        raise NumericalError("non-finite Hessian at the mode")
    try:
        cov = np.linalg.inv(-hessian)
    except np.linalg.LinAlgError:
        raise NumericalError("singular Hessian at the mode") from None
    return mode, 0.5 * (cov + cov.T)


@dataclass(frozen=True)
class BlockProposal:
    mode: np.ndarray
    scale: np.ndarray
    df: float = Constants.BLOCK_PROPOSAL_DF
    _dist: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mode = np.atleast_1d(np.asarray(self.mode, dtype=float))
        scale = np.atleast_2d(np.asarray(self.scale, dtype=float))
        if scale.shape != (mode.size, mode.size):
            raise NumericalError("Block proposal scale does not match the mode.", {"shape": list(scale.shape)})
        try:
            np.linalg.cholesky(scale)
        except np.linalg.LinAlgError:
            raise NumericalError("Block proposal scale is not positive definite.") from None
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "_dist", multivariate_t(mode, scale, df=self.df))

    def draw(self, rng: RngState) -> np.ndarray:
        return np.atleast_1d(self._dist.rvs(random_state=rng.generator)).astype(float)

    def logDensity(self, params) -> float:
        return float(self._dist.logpdf(np.asarray(params, dtype=float)))


def buildBlockProposal(logTarget, start, label: str) -> BlockProposal | None:
    try:
        mode, cov = findMode(logTarget, start)
        return BlockProposal(mode, projectSpd(cov))
    except NumericalError as e:
        logger.warning(f"Skipping the joint {label} move: {e.message}.")
        return None


def independenceStep(proposal: BlockProposal, current, currentLogTarget: float, logTarget, rng: RngState):
    """Returns the new parameters, their log target and whether the candidate was accepted."""
    candidate = proposal.draw(rng)
    logU = np.log(rng.generator.uniform())
    candidateLogTarget = logTarget(candidate)
    if not np.isfinite(candidateLogTarget):
        return np.array(current, dtype=float), currentLogTarget, False

    ratio = (candidateLogTarget - currentLogTarget
             + proposal.logDensity(current) - proposal.logDensity(candidate))
    if logU < min(0.0, ratio):
        return candidate, candidateLogTarget, True
    return np.array(current, dtype=float), currentLogTarget, False
