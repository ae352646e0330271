"""Simulated ordinal datasets.

Study 1: three standard-uniform covariates with no intercept, beta = (-2, 3, 4), errors from a
0.3/0.7 mixture of logistics centred at -5 and 2 with variance pi^2/3 (unit scale), discretized
at gamma = (0, 2, 3) into four categories.

Study 2: an intercept plus two standard normal covariates with correlation 0.25,
beta = (2, 2, 1), errors from a 0.3/0.7 mixture of N(-6, 4) and N(5, 1) (second argument is a
variance), discretized at gamma = (0, 4) into three categories.
"""
from dataclasses import dataclass
import math
import numpy as np
import pandas as pd
from .distributions import RngState
from .errors import ParameterError
from .modelCore import CutpointVector, OrdinalDataset

MIN_OBSERVATIONS = 50


@dataclass(frozen=True)
class MixtureComponent:
    family: str
    location: float
    variance: float
    weight: float

    def draw(self, gen: np.random.Generator, size: int) -> np.ndarray:
        if self.family == "logistic":
            return gen.logistic(self.location, math.sqrt(3.0 * self.variance) / math.pi, size)
        if self.family == "normal":
            return gen.normal(self.location, math.sqrt(self.variance), size)
        raise ParameterError(f"Unknown error family '{self.family}'.")


@dataclass(frozen=True)
class SimRecipe:
    betaTrue: tuple
    errorMixture: tuple
    gammaTrue: tuple
    covariateLaw: str
    correlation: float = 0.0

    def __post_init__(self):
        weights = [c.weight for c in self.errorMixture]
        if not math.isclose(sum(weights), 1.0) or min(weights) < 0:
            raise ParameterError("Mixture weights must be non-negative and sum to 1.")
        if any(c.variance <= 0 for c in self.errorMixture):
            raise ParameterError("Mixture variances must be positive.")
        if np.any(np.diff(self.gammaTrue) <= 0):
            raise ParameterError("True cut-points must be increasing.")

    @property
    def J(self) -> int:
        return len(self.gammaTrue) + 1

    def covariateNames(self) -> tuple:
        if self.covariateLaw == "uniform":
            return tuple(f"x{j + 1}" for j in range(len(self.betaTrue)))
        return ("intercept",) + tuple(f"x{j + 1}" for j in range(len(self.betaTrue) - 1))


STUDY1 = SimRecipe(
    betaTrue=(-2.0, 3.0, 4.0),
    errorMixture=(
        MixtureComponent("logistic", -5.0, math.pi ** 2 / 3.0, 0.3),
        MixtureComponent("logistic", 2.0, math.pi ** 2 / 3.0, 0.7),
    ),
    gammaTrue=(0.0, 2.0, 3.0),
    covariateLaw="uniform",
)

STUDY2 = SimRecipe(
    betaTrue=(2.0, 2.0, 1.0),
    errorMixture=(
        MixtureComponent("normal", -6.0, 4.0, 0.3),
        MixtureComponent("normal", 5.0, 1.0, 0.7),
    ),
    gammaTrue=(0.0, 4.0),
    covariateLaw="correlated_normal_with_intercept",
    correlation=0.25,
)

STUDIES = {1: STUDY1, 2: STUDY2}


def drawCovariates(recipe: SimRecipe, n: int, gen: np.random.Generator) -> np.ndarray:
    k = len(recipe.betaTrue)
    if recipe.covariateLaw == "uniform":
        return gen.uniform(0.0, 1.0, (n, k))
    if recipe.covariateLaw == "correlated_normal_with_intercept":
        dim = k - 1
        corr = np.full((dim, dim), recipe.correlation) + (1.0 - recipe.correlation) * np.eye(dim)
        normals = gen.standard_normal((n, dim)) @ np.linalg.cholesky(corr).T
        return np.column_stack((np.ones(n), normals))
    raise ParameterError(f"Unknown covariate law '{recipe.covariateLaw}'.")


def drawErrors(recipe: SimRecipe, n: int, gen: np.random.Generator) -> np.ndarray:
    weights = np.array([c.weight for c in recipe.errorMixture])
    labels = gen.choice(len(weights), size=n, p=weights)
    errors = np.empty(n)
    for index, component in enumerate(recipe.errorMixture):
        mask = labels == index
        errors[mask] = component.draw(gen, int(mask.sum()))
    return errors


def drawLatent(recipe: SimRecipe, n: int, rng: RngState):
    if n < MIN_OBSERVATIONS:
        raise ParameterError(f"Simulations need at least {MIN_OBSERVATIONS} observations, got {n}.")
    gen = rng.generator
    X = drawCovariates(recipe, n, gen)
    z = X @ np.asarray(recipe.betaTrue) + drawErrors(recipe, n, gen)
    return X, z


def discretize(z, gammaTrue) -> np.ndarray:
    cuts = CutpointVector.fixed(gammaTrue)
    return np.searchsorted(cuts.gamma, z, side="left")


def simulate(recipe: SimRecipe, n: int, rng: RngState) -> OrdinalDataset:
    X, z = drawLatent(recipe, n, rng)
    return OrdinalDataset(X, discretize(z, recipe.gammaTrue), recipe.J, recipe.covariateNames())


def genStudy1(n: int, rng: RngState) -> OrdinalDataset:
    return simulate(STUDY1, n, rng)


def genStudy2(n: int, rng: RngState) -> OrdinalDataset:
    return simulate(STUDY2, n, rng)


def datasetFrame(data: OrdinalDataset) -> pd.DataFrame:
    """CSV layout read back by the CLI: covariates x1..xk (intercept column dropped) then y."""
    columns = {}
    for j, name in enumerate(data.covariateNames):
        if name == "intercept" and np.all(data.X[:, j] == 1.0):
            continue
        columns[name] = data.X[:, j]
    frame = pd.DataFrame(columns)
    frame[data.responseName] = data.y
    return frame


def writeDatasetCsv(data: OrdinalDataset, path: str):
    datasetFrame(data).to_csv(path, index=False, float_format="%.17g")
