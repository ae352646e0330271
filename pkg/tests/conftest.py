import logging
import numpy as np
import pytest
from quantord.distributions import QuantileSpec, RngState
from quantord.modelCore import OrdinalDataset, PriorSpec
from quantord.samplerOr1 import McmcConfig
from quantord.simData import genStudy1, genStudy2


@pytest.fixture
def rng():
    return RngState(20240607)


@pytest.fixture
def median():
    return QuantileSpec(0.5)


@pytest.fixture(scope="session")
def study1():
    return genStudy1(300, RngState(11))


@pytest.fixture(scope="session")
def study2():
    return genStudy2(300, RngState(11))


@pytest.fixture
def shortConfig():
    return McmcConfig(iterations=300, burnIn=100, seed=5)


@pytest.fixture
def tinyOr1Data():
    gen = np.random.default_rng(3)
    X = np.column_stack((np.ones(20), gen.normal(size=20)))
    y = np.array([1, 2, 3, 4] * 5)
    return OrdinalDataset(X, y, 4, ("intercept", "x1"))


def defaultPrior(data):
    return PriorSpec.defaults(data.k, data.J)


@pytest.fixture(autouse=True)
def propagateLogs():
    # configureLogging detaches the package logger from the root; caplog listens on the root.
    yield
    logging.getLogger("quantord").propagate = True
