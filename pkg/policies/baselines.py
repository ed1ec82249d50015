import math
from typing import Any, Dict, List, Optional

import numpy as np

from core.distributions import BidDistribution
from core.feedback import CensoredOutcome
from core.grids import GridSpec, GridStyle
from core.rewards import largest_argmax
from policies.base import AuctionPolicy


class ExploreThenCommit(AuctionPolicy):
    """Bid 0 for T_explore rounds (every m_t > 0 is revealed), then plug in the empirical CDF"""

    name = "etc"

    def __init__(self, T: int, T_explore: Optional[int] = None, K: Optional[int] = None) -> None:
        self.T_explore = T_explore if T_explore is not None else math.ceil(T ** (2.0 / 3.0))
        if self.T_explore < 1:
            raise ValueError(f"T_explore must be >= 1, got {self.T_explore}")
        self.grid = GridSpec(K or math.ceil(math.sqrt(T)), GridStyle.OFFSET)
        self._samples: List[float] = []
        self._cdf_hat: Optional[np.ndarray] = None

    def empirical_cdf(self) -> np.ndarray:
        """G_hat on the grid points from the exploration sample"""
        if self._cdf_hat is None:
            ordered = np.sort(np.asarray(self._samples, dtype=np.float64))
            self._cdf_hat = np.searchsorted(ordered, self.grid.points, side="right") / max(ordered.size, 1)
        return self._cdf_hat

    def bid(self, t: int, value: float) -> float:
        if t <= self.T_explore:
            return 0.0
        rewards = (value - self.grid.points) * self.empirical_cdf()
        return float(self.grid.points[largest_argmax(rewards)])

    def observe(self, t: int, bid: float, outcome: CensoredOutcome) -> None:
        if t > self.T_explore:
            return
        # bidding 0 and winning means m_t = 0
        self._samples.append(0.0 if outcome.won else float(outcome.revealed_m))  # type: ignore
        self._cdf_hat = None

    def describe(self) -> Dict[str, Any]:
        info = super().describe()
        info["T_explore"] = self.T_explore
        return info


class OracleBidder(AuctionPolicy):
    """Knows G; bids the best grid point for every value"""

    name = "oracle"

    def __init__(self, G: BidDistribution, grid: GridSpec) -> None:
        self.G = G
        self.grid = grid
        self._cdf_at = G.cdf(grid.points)

    def bid(self, t: int, value: float) -> float:
        rewards = (value - self.grid.points) * self._cdf_at
        return float(self.grid.points[largest_argmax(rewards)])

    def observe(self, t: int, bid: float, outcome: CensoredOutcome) -> None:
        return None
