"""Posterior summaries, batch-means inefficiency factors, DIC and covariate effects."""
from dataclasses import dataclass, field
import math
from typing import NamedTuple
import numpy as np
import pandas as pd
from .constants import Constants
from .distributions import QuantileSpec
from .errors import DegenerateSeriesError, DomainError, NumericalError, ParameterError
from .logManager import getLogger
from .modelCore import CutpointVector, OrdinalDataset, gammaFromDelta, ordinalLogLik, outcomeProbMatrix

logger = getLogger(__name__)

LOGLIK_COLUMN = "loglik"


@dataclass
class Chain:
    draws: np.ndarray
    names: list
    logLikTrace: np.ndarray
    acceptRate: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.draws = np.atleast_2d(np.asarray(self.draws, dtype=float))
        self.names = list(self.names)
        self.logLikTrace = np.asarray(self.logLikTrace, dtype=float)
        if self.draws.shape[0] < 1:
            raise ParameterError("A chain needs at least one stored draw.")
        if len(self.names) != self.draws.shape[1]:
            raise ParameterError(f"{len(self.names)} names given for {self.draws.shape[1]} parameters.")
        if self.logLikTrace.shape != (self.draws.shape[0],):
            raise ParameterError("Log-likelihood trace length must match the number of draws.")

    @property
    def model(self) -> str:
        return self.meta.get("model", "or1")

    @property
    def size(self) -> int:
        return self.draws.shape[0]

    @property
    def k(self) -> int:
        return int(self.meta.get("k", sum(name.startswith("beta_") for name in self.names)))

    def column(self, name: str) -> np.ndarray:
        return self.draws[:, self.names.index(name)]

    def toFrame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.draws, columns=self.names)
        frame[LOGLIK_COLUMN] = self.logLikTrace
        return frame

    @classmethod
    def fromFrame(cls, frame: pd.DataFrame, meta: dict) -> "Chain":
        names = [c for c in frame.columns if c != LOGLIK_COLUMN]
        trace = frame[LOGLIK_COLUMN].to_numpy(float) if LOGLIK_COLUMN in frame else np.full(len(frame), np.nan)
        return cls(frame[names].to_numpy(float), names, trace, meta.get("acceptance_rate"), meta)


@dataclass(frozen=True)
class SummaryRow:
    name: str
    mean: float
    std: float
    ifFactor: float
    q025: float
    q50: float
    q975: float
    degenerate: bool = False


class DicResult(NamedTuple):
    dic: float
    pD: float
    dBar: float
    dThetaBar: float


@dataclass(frozen=True)
class CovariateChange:
    fromValue: float | None = None
    toValue: float | None = None
    additive: float | None = None

    def __post_init__(self):
        absolute = self.fromValue is not None and self.toValue is not None
        if absolute == (self.additive is not None):
            raise ParameterError("Give either both from/to values or an additive change.")

    def apply(self, column: np.ndarray):
        if self.additive is not None:
            return column, column + self.additive
        return np.full_like(column, self.fromValue), np.full_like(column, self.toValue)


def defaultBatchSize(length: int) -> int:
    size = int(math.floor(math.sqrt(length)))
    if 4 * size > length:
        size = max(1, length // 4)
    return size


def inefficiencyFactor(series, batchSize: int | None = None) -> float:
    """Batch-means estimate of the variance inflation of a correlated series."""
    series = np.asarray(series, dtype=float)
    length = series.size
    size = batchSize or defaultBatchSize(length)
    if size < 1 or length < 4 * size:
        raise ParameterError(f"Series of length {length} is too short for batches of {size}.")
    variance = np.var(series, ddof=1)
    if not variance > 0:
        raise DegenerateSeriesError("Degenerate series: zero variance.", {"length": length})

    count = length // size
    batches = series[length - count * size:].reshape(count, size)
    return float(size * np.var(batches.mean(axis=1), ddof=1) / variance)


def summarize(chain: Chain) -> list:
    if chain.size < 2:
        raise ParameterError("Summaries need at least two stored draws.")
    short = chain.size < 4
    if short:
        logger.warning(f"Only {chain.size} stored draws: too few for batch means, inefficiency factors set to NaN.")
    rows = []
    for j, name in enumerate(chain.names):
        column = chain.draws[:, j]
        factor, degenerate = float("nan"), False
        if not short:
            try:
                factor = inefficiencyFactor(column)
            except DegenerateSeriesError:
                degenerate = True
        q025, q50, q975 = np.quantile(column, [0.025, 0.5, 0.975])
        rows.append(SummaryRow(name, float(np.mean(column)), float(np.std(column, ddof=1)), factor,
                               float(q025), float(q50), float(q975), degenerate))
    return rows


def summaryFrame(rows: list) -> pd.DataFrame:
    return pd.DataFrame({
        "name": [r.name for r in rows],
        "mean": [r.mean for r in rows],
        "std": [r.std for r in rows],
        "if": [r.ifFactor for r in rows],
        "q2.5": [r.q025 for r in rows],
        "q50": [r.q50 for r in rows],
        "q97.5": [r.q975 for r in rows],
    })


def _fixedCuts(chain: Chain, fixedCuts: CutpointVector | None) -> CutpointVector:
    if fixedCuts is not None:
        return fixedCuts
    if "cutpoints" not in chain.meta:
        raise DomainError("Fixed cut-points are needed for a fixed cut-point chain.")
    return CutpointVector.fixed(chain.meta["cutpoints"])


def drawParameters(chain: Chain, row, fixedCuts: CutpointVector | None = None):
    """(beta, cut-points, scale) for one parameter vector of the chain."""
    row = np.asarray(row, dtype=float)
    k = chain.k
    beta = row[:k]
    if chain.model == "or1":
        J = int(chain.meta.get("J", row.size - k + 2))
        anchor = chain.meta.get("anchor", Constants.CUTPOINT_ANCHOR)
        return beta, gammaFromDelta(row[k:], J, anchor), 1.0
    return beta, _fixedCuts(chain, fixedCuts), float(row[k])


def gammaSummary(chain: Chain) -> list:
    _, cuts, _ = drawParameters(chain, chain.draws.mean(axis=0))
    return cuts.interior.tolist()


def dic(chain: Chain, data: OrdinalDataset, spec: QuantileSpec, fixedCuts: CutpointVector | None = None) -> DicResult:
    """DIC = D(theta-bar) + 2 p_D with the posterior mean taken in the sampling space."""
    trace = chain.logLikTrace
    bad = ~np.isfinite(trace)
    if bad.any():
        share = bad.mean()
        if share > Constants.SENTINEL_TOLERANCE:
            raise NumericalError(f"{bad.sum()} of {trace.size} stored log-likelihoods are -inf.",
                                 {"sentinel_share": float(share)})
        logger.warning(f"Excluding {bad.sum()} -inf log-likelihood draws from DIC.")

    dBar = float(np.mean(-2.0 * trace[~bad]))
    beta, cuts, scale = drawParameters(chain, chain.draws.mean(axis=0), fixedCuts)
    dThetaBar = -2.0 * ordinalLogLik(beta, cuts, scale, spec, data)
    if not np.isfinite(dThetaBar):
        raise NumericalError("Deviance at the posterior mean is infinite.")
    pD = dBar - dThetaBar
    return DicResult(dThetaBar + 2.0 * pD, pD, dBar, dThetaBar)


def _covariateIndex(data: OrdinalDataset, covariate) -> int:
    if isinstance(covariate, str):
        if covariate not in data.covariateNames:
            raise DomainError(f"Unknown covariate '{covariate}'.")
        return data.covariateNames.index(covariate)
    index = int(covariate)
    if not 0 <= index < data.k:
        raise DomainError(f"Covariate index {index} is outside 0..{data.k - 1}.")
    return index


def covariateEffect(chain: Chain, data: OrdinalDataset, spec: QuantileSpec, covariate,
                    change: CovariateChange, fixedCuts: CutpointVector | None = None) -> np.ndarray:
    """Average change in each category probability, over draws and observed covariate rows."""
    if chain.k != data.k:
        raise DomainError(f"Chain has {chain.k} coefficients but the data has {data.k} covariates.")
    index = _covariateIndex(data, covariate)
    before, after = data.X.copy(), data.X.copy()
    before[:, index], after[:, index] = change.apply(data.X[:, index])

    total = np.zeros(data.J)
    for row in chain.draws:
        beta, cuts, scale = drawParameters(chain, row, fixedCuts)
        diff = outcomeProbMatrix(after, beta, cuts, scale, spec) - outcomeProbMatrix(before, beta, cuts, scale, spec)
        total += diff.sum(axis=0)
    return total / (chain.size * data.n)


def posteriorPredictive(chain: Chain, data: OrdinalDataset, spec: QuantileSpec,
                        fixedCuts: CutpointVector | None = None) -> np.ndarray:
    total = np.zeros(data.J)
    for row in chain.draws:
        beta, cuts, scale = drawParameters(chain, row, fixedCuts)
        total += outcomeProbMatrix(data.X, beta, cuts, scale, spec).sum(axis=0)
    return total / (chain.size * data.n)
