import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from core.feedback import CensoredOutcome
from core.grids import GridSpec, GridStyle
from policies.base import AuctionPolicy


def tail_sums(x: np.ndarray) -> np.ndarray:
    """out[i] = sum_{j >= i} x[j]"""
    return np.cumsum(x[::-1])[::-1]


@dataclass
class IsUcbState:
    K: int
    gamma: float
    p_hat: np.ndarray = field(init=False)
    counts: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.p_hat = np.zeros(self.K, dtype=np.float64)
        self.counts = np.zeros(self.K, dtype=np.int64)


def is_ucb_index(state: IsUcbState, grid: GridSpec, value: float) -> np.ndarray:
    """(v - b^i)[1 - sum_{j>=i} p_j + gamma(sqrt(sum_{j>=i} p_j/n_j) + 1/n_i)], unclipped"""
    n = state.counts.astype(np.float64)
    spread = np.sqrt(tail_sums(state.p_hat / n))
    bracket = 1.0 - tail_sums(state.p_hat) + state.gamma * (spread + 1.0 / n)
    return (value - grid.points) * bracket


def is_ucb_round(state: IsUcbState, grid: GridSpec, value: float) -> int:
    """0-based bid index; first round (no data yet) bids b^1 = 0; ties go to the smallest bid"""
    if state.counts[0] == 0:
        return 0
    return int(np.argmax(is_ucb_index(state, grid, value)))


def is_ucb_observe(state: IsUcbState, grid: GridSpec, index: int, outcome: CensoredOutcome) -> None:
    """Every interval at or above the bid gets one more sample of 1(m in (b^i, b^{i+1}])"""
    hit = np.zeros(state.K - index, dtype=np.float64)
    if not outcome.won:
        j = grid.interval_index(outcome.revealed_m)  # type: ignore
        if j >= index:
            hit[j - index] = 1.0
    n_old = state.counts[index:].astype(np.float64)
    state.p_hat[index:] = n_old / (n_old + 1.0) * state.p_hat[index:] + hit / (n_old + 1.0)
    state.counts[index:] += 1


class IsUcbBidder(AuctionPolicy):
    name = "is_ucb"

    def __init__(self, T: int, gamma: float = 3.0, K: Optional[int] = None) -> None:
        self.grid = GridSpec(K or math.ceil(math.sqrt(T)), GridStyle.OFFSET)
        self.state = IsUcbState(self.grid.K, gamma)
        self._pending: Optional[int] = None

    def bid(self, t: int, value: float) -> float:
        self._pending = 0 if t == 1 else is_ucb_round(self.state, self.grid, value)
        return float(self.grid.points[self._pending])

    def observe(self, t: int, bid: float, outcome: CensoredOutcome) -> None:
        if self._pending is None:
            raise RuntimeError("observe called before bid")
        is_ucb_observe(self.state, self.grid, self._pending, outcome)
        self._pending = None

    def describe(self) -> Dict[str, Any]:
        info = super().describe()
        info["gamma"] = self.state.gamma
        return info
