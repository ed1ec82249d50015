import math
from dataclasses import dataclass

from core.distributions import TwoPointDistribution
from core.errors import ConfigurationError
from environments.schedules import ValueSchedule


@dataclass(frozen=True)
class TwoPointPair:
    """G1, G2 that no policy can tell apart in T rounds; value is always 1"""

    T: int
    delta: float
    g1: TwoPointDistribution
    g2: TwoPointDistribution

    @property
    def schedule(self) -> ValueSchedule:
        return ValueSchedule(kind="constant", value=1.0)

    def regret_floor(self) -> float:
        """sqrt(T) / (24 e^2): the average regret no policy can beat on this pair"""
        return math.sqrt(self.T) / (24.0 * math.e ** 2)


def two_point_env(T: int) -> TwoPointPair:
    if T < 4:
        raise ConfigurationError(f"two-point pair needs T >= 4, got {T}")
    delta = 1.0 / (4.0 * math.sqrt(T))
    return TwoPointPair(T=T, delta=delta, g1=TwoPointDistribution(delta, 1), g2=TwoPointDistribution(delta, 2))
