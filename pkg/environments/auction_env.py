from typing import Optional, Tuple

import numpy as np

from core.distributions import BidDistribution
from core.feedback import CensoredOutcome, check_price
from environments.schedules import ValueSchedule


class AuctionEnv:
    """Repeated first-price auction: m_t iid from G, values from an oblivious schedule.

    The schedule and the auction draw from separate generators. ``step``
    returns the censored outcome for the policy and the true m_t for the
    harness only.
    """

    def __init__(self, G: BidDistribution, schedule: ValueSchedule, rng: np.random.Generator) -> None:
        self.G = G
        self.schedule = schedule
        self.rng = rng
        self._m: Optional[np.ndarray] = None

    def reset(self, T: int) -> None:
        self._m = np.asarray(self.G.sample(self.rng, T), dtype=np.float64)

    def competing_bid(self, t: int) -> float:
        if self._m is None:
            raise RuntimeError("environment used before reset")
        return float(self._m[t - 1])

    def step(self, t: int, bid: float) -> Tuple[CensoredOutcome, float]:
        check_price("bid", bid)
        m = self.competing_bid(t)
        return CensoredOutcome.from_auction(bid, m), m
