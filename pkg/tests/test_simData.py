import numpy as np
import pandas as pd
import pytest
from scipy.stats import skew
from quantord.distributions import RngState
from quantord.errors import ParameterError
from quantord.simData import (
    STUDY1, STUDY2, MixtureComponent, datasetFrame, discretize, drawLatent, genStudy1, genStudy2, writeDatasetCsv,
)


def twoMeansSeparation(values):
    """Best two-cluster split of sorted values; returns the gap between cluster means in pooled sds."""
    values = np.sort(values)
    best = None
    for cut in range(10, values.size - 10):
        left, right = values[:cut], values[cut:]
        within = left.var() * left.size + right.var() * right.size
        if best is None or within < best[0]:
            best = (within, left, right)
    _, left, right = best
    return (right.mean() - left.mean()) / np.sqrt(0.5 * (left.var() + right.var()))


@pytest.fixture(scope="module")
def study1Shares():
    return genStudy1(200000, RngState(99)).categoryCounts() / 200000


@pytest.mark.parametrize("seed", range(5))
def test_study1_counts(seed, study1Shares):
    data = genStudy1(300, RngState(seed))
    counts = data.categoryCounts()
    assert data.J == 4 and data.k == 3
    assert set(np.unique(data.y)) <= {1, 2, 3, 4}
    assert np.all(np.abs(counts - 300 * study1Shares) <= 35)
    assert min(counts[0], counts[3]) > max(counts[1], counts[2])


def test_study1_latent_is_negatively_skewed():
    _, z = drawLatent(STUDY1, 5000, RngState(1))
    assert skew(z) < 0


def test_study1_has_no_intercept(study1):
    assert study1.covariateNames == ("x1", "x2", "x3")
    assert np.all((study1.X >= 0) & (study1.X < 1))


@pytest.mark.parametrize("seed", range(5))
def test_study2_counts(seed):
    data = genStudy2(300, RngState(seed))
    assert data.J == 3 and data.k == 3
    assert np.all(np.abs(data.categoryCounts() - np.array([77, 38, 185])) <= 35)


def test_study2_covariates(study2):
    assert study2.covariateNames == ("intercept", "x1", "x2")
    assert np.all(study2.X[:, 0] == 1.0)
    assert abs(np.corrcoef(study2.X[:, 1], study2.X[:, 2])[0, 1] - 0.25) < 0.1


def test_study2_latent_is_bimodal():
    _, z = drawLatent(STUDY2, 300, RngState(4))
    assert twoMeansSeparation(z) > 2.0


def test_generators_are_deterministic():
    first, second = genStudy1(120, RngState(7)), genStudy1(120, RngState(7))
    assert np.array_equal(first.X, second.X) and np.array_equal(first.y, second.y)
    other = genStudy1(120, RngState(8))
    assert not np.array_equal(first.y, other.y)
    assert other.J == first.J and other.k == first.k


def test_minimum_size():
    with pytest.raises(ParameterError):
        genStudy2(49, RngState(0))


def test_discretize_uses_right_closed_intervals():
    assert np.array_equal(discretize([-1.0, 0.0, 0.5, 4.0, 4.1], (0.0, 4.0)), [1, 1, 2, 2, 3])


def test_mixture_component_variance_convention():
    gen = np.random.default_rng(0)
    logistic = MixtureComponent("logistic", -5.0, np.pi ** 2 / 3.0, 1.0).draw(gen, 200000)
    normal = MixtureComponent("normal", -6.0, 4.0, 1.0).draw(gen, 200000)
    assert abs(logistic.var() - np.pi ** 2 / 3.0) < 0.05
    assert abs(normal.std() - 2.0) < 0.02
    with pytest.raises(ParameterError):
        MixtureComponent("cauchy", 0.0, 1.0, 1.0).draw(gen, 1)


def test_recipes_are_valid():
    assert sum(c.weight for c in STUDY1.errorMixture) == pytest.approx(1.0)
    assert STUDY2.J == 3 and STUDY1.J == 4


def test_csv_layout(study2, tmp_path):
    assert list(datasetFrame(study2).columns) == ["x1", "x2", "y"]
    path = tmp_path / "study2.csv"
    writeDatasetCsv(study2, str(path))
    frame = pd.read_csv(path, float_precision="round_trip")
    assert np.array_equal(frame["y"].to_numpy(), study2.y)
    assert np.array_equal(frame["x1"].to_numpy(), study2.X[:, 1])
