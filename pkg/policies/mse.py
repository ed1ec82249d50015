import math
from typing import Any, Dict, Optional

import numpy as np

from core.feedback import CensoredOutcome
from core.grids import GridSpec, GridStyle
from core.rewards import quantize_index
from policies.base import AuctionPolicy
from policies.elimination import MonotoneSuccessiveElimination


def auction_reveal(outcome: CensoredOutcome, action: int, M: int, K: int) -> np.ndarray:
    """Rewards (c/M - a/K) 1(m <= a/K) for every context c and every a >= action"""
    values = GridSpec(M, GridStyle.UNIT).points[:, None]
    bids = GridSpec(K, GridStyle.UNIT).points[action - 1:][None, :]
    if outcome.won:
        wins = np.ones_like(bids)
    else:
        wins = (bids >= outcome.revealed_m).astype(np.float64)
    return (values - bids) * wins


class MseBidder(AuctionPolicy):
    """MSE run on the quantized auction: value v -> context ceil(vM), action a -> bid a/K"""

    name = "mse"

    def __init__(self, T: int, gamma: float = 3.0, M: Optional[int] = None, K: Optional[int] = None,
                 sequential: bool = False) -> None:
        root = math.ceil(math.sqrt(T))
        self.M = M or root
        self.K = K or root
        self.grid = GridSpec(self.K, GridStyle.UNIT)
        self.engine = MonotoneSuccessiveElimination(self.M, self.K, T, gamma, sequential=sequential)
        self._pending: Optional[tuple] = None

    @property
    def state(self):
        return self.engine.state

    def bid(self, t: int, value: float) -> float:
        context = quantize_index(value, self.M)
        action = self.engine.choose(context)
        self._pending = (context, action)
        return float(self.grid.points[action - 1])

    def observe(self, t: int, bid: float, outcome: CensoredOutcome) -> None:
        if self._pending is None:
            raise RuntimeError("observe called before bid")
        context, action = self._pending
        self.engine.observe(context, action, auction_reveal(outcome, action, self.M, self.K))
        self._pending = None

    def describe(self) -> Dict[str, Any]:
        info = super().describe()
        info.update({"M": self.M, "gamma": self.engine.state.gamma})
        return info
