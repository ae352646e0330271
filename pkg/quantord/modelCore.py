"""Datasets, cut-points, priors and the ordinal AL likelihood."""
from dataclasses import dataclass, field
from functools import cached_property
import numpy as np
from scipy.stats import multivariate_normal
from .constants import Constants
from .distributions import QuantileSpec, alIntervalProb
from .errors import DomainError, ParameterError
from .logManager import getLogger

logger = getLogger(__name__)


@dataclass(frozen=True)
class OrdinalDataset:
    X: np.ndarray
    y: np.ndarray
    J: int
    covariateNames: tuple = ()
    responseName: str = "y"

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y)
        if y.ndim != 1 or y.size != X.shape[0]:
            raise DomainError(f"Response has {y.size} entries but X has {X.shape[0]} rows.")
        if not np.all(np.isfinite(X)):
            raise DomainError("Covariate matrix contains non-finite entries.")
        if X.shape[0] < X.shape[1]:
            raise DomainError(f"Need at least as many observations as covariates (n={X.shape[0]}, k={X.shape[1]}).")
        if np.any(y != np.round(y)):
            raise DomainError("Response labels must be integers.")
        y = y.astype(int)
        J = int(self.J)
        if J < 2 or np.any((y < 1) | (y > J)):
            raise DomainError(f"Response labels must lie in 1..{J}.")

        counts = np.bincount(y, minlength=J + 1)[1:]
        missing = [j + 1 for j, c in enumerate(counts) if c == 0]
        if missing:
            logger.warning(f"Categories {missing} have no observations.")

        names = tuple(self.covariateNames) or tuple(f"x{j + 1}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DomainError("Covariate name count does not match the columns of X.")

        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "covariateNames", names)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]

    def categoryCounts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.J + 1)[1:]


@dataclass(frozen=True)
class CutpointVector:
    """Full cut-point vector (-inf, gamma_1, ..., gamma_{J-1}, +inf)."""

    gamma: np.ndarray
    freeCount: int = 0

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.ndim != 1 or gamma.size < 3:
            raise DomainError("Cut-point vector needs at least one interior value.")
        if gamma[0] != -np.inf or gamma[-1] != np.inf:
            raise DomainError("Cut-point vector must start at -inf and end at +inf.")
        interior = gamma[1:-1]
        if not np.all(np.isfinite(interior)):
            raise DomainError("Interior cut-points must be finite.")
        if np.any(np.diff(gamma) <= 0):
            raise DomainError(f"Cut-points must be strictly increasing, got {interior.tolist()}.")
        gamma.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def fromInterior(cls, interior, freeCount: int = 0) -> "CutpointVector":
        interior = np.atleast_1d(np.asarray(interior, dtype=float))
        return cls(np.concatenate(([-np.inf], interior, [np.inf])), freeCount)

    @classmethod
    def fixed(cls, values) -> "CutpointVector":
        return cls.fromInterior(values, freeCount=0)

    @property
    def J(self) -> int:
        return self.gamma.size - 1

    @property
    def interior(self) -> np.ndarray:
        return self.gamma[1:-1]

    def categoryBounds(self, y) -> tuple:
        y = np.asarray(y, dtype=int)
        return self.gamma[y - 1], self.gamma[y]


@dataclass(frozen=True)
class TransformedCutpoints:
    delta: np.ndarray

    def __post_init__(self):
        delta = np.atleast_1d(np.asarray(self.delta, dtype=float))
        object.__setattr__(self, "delta", delta)


def _asMatrix(value, dim: int, label: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return float(arr) * np.eye(dim)
    if arr.shape != (dim, dim):
        raise ParameterError(f"{label} must be a scalar or a {dim}x{dim} matrix.")
    return arr


def _asVector(value, dim: int, label: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(dim, float(arr))
    if arr.shape != (dim,):
        raise ParameterError(f"{label} must be a scalar or a vector of length {dim}.")
    return arr


def _checkSpd(matrix: np.ndarray, label: str):
    if matrix.size == 0:
        return
    if not np.allclose(matrix, matrix.T):
        raise ParameterError(f"{label} must be symmetric.")
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        raise ParameterError(f"{label} must be positive definite.") from None


@dataclass(frozen=True)
class PriorSpec:
    betaMean: np.ndarray
    betaCov: np.ndarray
    deltaMean: np.ndarray = field(default_factory=lambda: np.zeros(0))
    deltaCov: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    sigmaShapeN0: float = Constants.SIGMA_SHAPE_N0
    sigmaRateD0: float = Constants.SIGMA_RATE_D0

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.betaMean)).size
        object.__setattr__(self, "betaMean", _asVector(self.betaMean, k, "beta_mean"))
        object.__setattr__(self, "betaCov", _asMatrix(self.betaCov, k, "beta_cov"))
        m = np.atleast_1d(np.asarray(self.deltaMean)).size
        object.__setattr__(self, "deltaMean", _asVector(self.deltaMean, m, "delta_mean") if m else np.zeros(0))
        object.__setattr__(self, "deltaCov", _asMatrix(self.deltaCov, m, "delta_cov") if m else np.zeros((0, 0)))
        _checkSpd(self.betaCov, "beta_cov")
        _checkSpd(self.deltaCov, "delta_cov")
        if not (self.sigmaShapeN0 > 0 and self.sigmaRateD0 > 0):
            raise ParameterError("Inverse-gamma hyperparameters n0 and d0 must be positive.")

    @classmethod
    def defaults(cls, k: int, J: int) -> "PriorSpec":
        m = max(J - 2, 0)
        return cls(
            betaMean=np.zeros(k),
            betaCov=Constants.BETA_PRIOR_VAR * np.eye(k),
            deltaMean=np.zeros(m),
            deltaCov=Constants.DELTA_PRIOR_VAR * np.eye(m),
        )

    @classmethod
    def fromDict(cls, values: dict, k: int, J: int) -> "PriorSpec":
        base = cls.defaults(k, J)
        m = max(J - 2, 0)
        unknown = set(values) - {"beta_mean", "beta_cov", "delta_mean", "delta_cov", "n0", "d0"}
        if unknown:
            raise ParameterError(f"Unknown prior keys: {sorted(unknown)}.")
        return cls(
            betaMean=_asVector(values.get("beta_mean", base.betaMean), k, "beta_mean"),
            betaCov=_asMatrix(values.get("beta_cov", base.betaCov), k, "beta_cov"),
            deltaMean=_asVector(values.get("delta_mean", base.deltaMean), m, "delta_mean"),
            deltaCov=_asMatrix(values.get("delta_cov", base.deltaCov), m, "delta_cov"),
            sigmaShapeN0=float(values.get("n0", base.sigmaShapeN0)),
            sigmaRateD0=float(values.get("d0", base.sigmaRateD0)),
        )

    @cached_property
    def betaPrecision(self) -> np.ndarray:
        return np.linalg.inv(self.betaCov)

    @cached_property
    def _deltaPrior(self):
        return multivariate_normal(mean=self.deltaMean, cov=self.deltaCov)

    def deltaLogDensity(self, delta) -> float:
        if self.deltaMean.size == 0:
            return 0.0
        return float(self._deltaPrior.logpdf(np.asarray(delta, dtype=float)))

    def betaLogDensity(self, beta) -> float:
        return float(multivariate_normal(mean=self.betaMean, cov=self.betaCov).logpdf(beta))


def deltaFromGamma(cuts: CutpointVector) -> TransformedCutpoints:
    interior = cuts.interior
    if np.any(np.diff(interior) <= 0):
        raise DomainError("Cut-points must be strictly increasing.")
    return TransformedCutpoints(np.log(np.diff(interior)))


def gammaFromDelta(delta, J: int, anchor: float = Constants.CUTPOINT_ANCHOR) -> CutpointVector:
    delta = np.atleast_1d(np.asarray(getattr(delta, "delta", delta), dtype=float))
    if delta.size != J - 2:
        raise DomainError(f"{J} categories need {J - 2} transformed cut-points, got {delta.size}.")
    if not np.all(np.isfinite(delta)):
        raise DomainError("Transformed cut-points must be finite.")
    if np.any(delta > Constants.EXP_CLAMP):
        raise DomainError(f"Transformed cut-point exceeds {Constants.EXP_CLAMP:g}; exp would overflow.")
    interior = anchor + np.concatenate(([0.0], np.cumsum(np.exp(delta))))
    return CutpointVector.fromInterior(interior, freeCount=delta.size)


def _checkDims(beta, cuts: CutpointVector, data: OrdinalDataset) -> np.ndarray:
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if beta.size != data.k:
        raise DomainError(f"beta has {beta.size} entries but the data has {data.k} covariates.")
    if cuts.J != data.J:
        raise DomainError(f"Cut-points define {cuts.J} categories but the data has {data.J}.")
    return beta


def observationProbs(xb, y, cuts: CutpointVector, scale: float, spec: QuantileSpec) -> np.ndarray:
    lo, hi = cuts.categoryBounds(y)
    return alIntervalProb(lo - xb, hi - xb, spec, scale)


def ordinalLogLik(beta, cuts: CutpointVector, scale: float, spec: QuantileSpec, data: OrdinalDataset) -> float:
    """Ordinal AL log-likelihood; -inf when an observed category has zero probability."""
    beta = _checkDims(beta, cuts, data)
    probs = observationProbs(data.X @ beta, data.y, cuts, scale, spec)
    if np.any(probs <= 0):
        return -np.inf
    return float(np.sum(np.log(probs)))


def outcomeProbs(x, beta, cuts: CutpointVector, scale: float, spec: QuantileSpec) -> np.ndarray:
    xb = float(np.dot(np.asarray(x, dtype=float), np.asarray(beta, dtype=float)))
    return np.asarray(alIntervalProb(cuts.gamma[:-1] - xb, cuts.gamma[1:] - xb, spec, scale))


def outcomeProbMatrix(X, beta, cuts: CutpointVector, scale: float, spec: QuantileSpec) -> np.ndarray:
    xb = (np.asarray(X, dtype=float) @ np.asarray(beta, dtype=float))[:, None]
    return alIntervalProb(cuts.gamma[None, :-1] - xb, cuts.gamma[None, 1:] - xb, spec, scale)


def checkLoss(u, p: float):
    u = np.asarray(u, dtype=float)
    loss = u * (p - (u < 0))
    return float(loss) if loss.ndim == 0 else loss


def alLogLikContinuous(residuals, spec: QuantileSpec, scale: float = 1.0) -> float:
    """AL(0, scale, p) log-likelihood of continuous residuals: a constant minus the scaled check loss."""
    residuals = np.asarray(residuals, dtype=float)
    n = residuals.size
    return float(n * np.log(spec.p * (1.0 - spec.p) / scale) - np.sum(checkLoss(residuals, spec.p)) / scale)
