import numpy as np
import pytest

from crowdpac.geometry import Halfspace
from crowdpac.oracles import CrowdConfig, CrowdOracle, QueryLedger


def make_rng(*key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(key)))


def make_oracle(weights, alpha, beta, *key, pool=None) -> CrowdOracle:
    return CrowdOracle(
        Halfspace(np.asarray(weights, dtype=float)),
        CrowdConfig(alpha=alpha, beta=beta, pool=pool),
        make_rng(*key),
        QueryLedger(),
    )


def column_points(projections) -> np.ndarray:
    """2-D instances whose first coordinate carries the order."""
    projections = np.asarray(projections, dtype=float)
    return np.column_stack([projections, np.zeros_like(projections)])


@pytest.fixture
def axis_truth() -> Halfspace:
    return Halfspace(np.array([1.0, 0.0]))
