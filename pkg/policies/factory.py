import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from core.distributions import BidDistribution
from core.errors import ConfigurationError
from core.grids import GridSpec, GridStyle
from policies.base import AuctionPolicy
from policies.baselines import ExploreThenCommit, OracleBidder
from policies.is_ucb import IsUcbBidder
from policies.ml_is_ucb import MlIsUcbBidder, ml_is_ucb_init
from policies.mse import MseBidder

POLICY_NAMES = ("mse", "is_ucb", "ml_is_ucb", "etc", "oracle")


@dataclass
class PolicySpec:
    policy: str
    gamma: float = 3.0
    M: Optional[int] = None
    K: Optional[int] = None
    L: Optional[int] = None
    T_explore: Optional[int] = None

    def __post_init__(self) -> None:
        if self.policy not in POLICY_NAMES:
            raise ConfigurationError(f"unknown policy '{self.policy}'; expected one of {POLICY_NAMES}")
        if self.gamma <= 0:
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")

    def validate_horizon(self, T: int) -> None:
        if T < 2:
            raise ConfigurationError(f"horizon must be at least 2, got {T}")
        if self.policy == "ml_is_ucb":
            ml_is_ucb_init(T, self.K, self.L, self.gamma)

    def to_config(self) -> Dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}


def build_policy(spec: PolicySpec, T: int, G: BidDistribution) -> AuctionPolicy:
    """Fresh policy for one episode; the oracle is the only one that sees G"""
    spec.validate_horizon(T)
    if spec.policy == "mse":
        return MseBidder(T, spec.gamma, spec.M, spec.K)
    if spec.policy == "is_ucb":
        return IsUcbBidder(T, spec.gamma, spec.K)
    if spec.policy == "ml_is_ucb":
        return MlIsUcbBidder(T, spec.gamma, spec.K, spec.L)
    if spec.policy == "etc":
        return ExploreThenCommit(T, spec.T_explore, spec.K)
    grid = GridSpec(spec.K or math.ceil(math.sqrt(T)), GridStyle.OFFSET)
    return OracleBidder(G, grid)
