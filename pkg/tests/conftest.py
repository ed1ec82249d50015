import numpy as np
import pytest

from core.distributions import AtomicDistribution, TruncatedNormalDistribution, TwoPointDistribution, UniformDistribution, random_piecewise


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


def shipped_families():
    """One instance of every distribution family the simulator ships"""
    return [
        UniformDistribution(),
        TwoPointDistribution(0.1, 1),
        TwoPointDistribution(0.1, 2),
        AtomicDistribution.from_breakpoints([0.1, 0.35, 0.6, 0.9], [0.2, 0.5, 0.55, 1.0]),
        random_piecewise(8, np.random.default_rng(3)),
        TruncatedNormalDistribution(0.4, 0.15),
    ]


@pytest.fixture(params=shipped_families(), ids=lambda d: d.family)
def family(request):
    return request.param
