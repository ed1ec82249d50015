"""Multi-level interval-splitting UCB bidder.

Rounds are assigned to accuracy levels 0..L. At level l the bidder first
computes a width (certificate) for every candidate bid using only the bids
already placed at level l and the probability estimates of level l-1; the
level-l outcomes are read only after the certificate says they are accurate
enough. The first T0 rounds bid 0 and seed every level with ceil(sqrt(T))
observations.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from core.errors import ConfigurationError, LevelExhaustedError
from core.feedback import CensoredOutcome
from core.grids import GridSpec, GridStyle
from policies.base import AuctionPolicy
from policies.is_ucb import tail_sums

logger = logging.getLogger(__name__)


class LevelHistory:
    """Bids and censored outcomes of the rounds assigned to one level"""

    def __init__(self, grid: GridSpec) -> None:
        self.grid = grid
        self.rounds: List[int] = []
        self.bid_indices: List[int] = []
        self.outcomes: List[CensoredOutcome] = []
        self._counts = np.zeros(grid.K, dtype=np.int64)
        self._hits = np.zeros(grid.K, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.rounds)

    def record(self, t: int, index: int, outcome: CensoredOutcome) -> None:
        self.rounds.append(t)
        self.bid_indices.append(index)
        self.outcomes.append(outcome)
        self._counts[index:] += 1
        # 1(b_s <= b^i) 1(b^i < m_s <= b^{i+1}) is zero on a win because m_s <= b_s <= b^i
        if not outcome.won:
            j = self.grid.interval_index(outcome.revealed_m)  # type: ignore
            if j >= index:
                self._hits[j] += 1

    def bid_counts(self) -> np.ndarray:
        """n_i = #{s at this level : b_s <= b^i}; depends on bids only"""
        return self._counts.copy()

    def interval_estimates(self) -> np.ndarray:
        """Empirical P(b^i < m <= b^{i+1}) from this level's outcomes"""
        n = np.maximum(self._counts, 1)
        return self._hits / n


def level_widths(p_prev: np.ndarray, counts: np.ndarray, gamma: float, log_term: float, T: int) -> np.ndarray:
    """gamma * (sqrt(log_term * sum_{j>=i} p_prev_j / n_j) + log_term * (1/n_i + 5/sqrt(T)))"""
    n = np.maximum(counts, 1).astype(np.float64)
    spread = np.sqrt(log_term * tail_sums(p_prev / n))
    return gamma * (spread + log_term * (1.0 / n + 5.0 / math.sqrt(T)))


@dataclass
class RoundScratch:
    """Per-round working sets, kept for inspection"""

    t: int
    level: int
    candidates: List[np.ndarray] = field(default_factory=list)
    widths: List[np.ndarray] = field(default_factory=list)
    estimates: List[np.ndarray] = field(default_factory=list)


@dataclass
class MlIsUcbState:
    T: int
    K: int
    L: int
    gamma: float
    seed: Optional[int] = None
    grid: GridSpec = field(init=False)
    block: int = field(init=False)
    T0: int = field(init=False)
    levels: List[LevelHistory] = field(init=False)
    level_of_round: np.ndarray = field(init=False)
    p0: Optional[np.ndarray] = None
    last_round: Optional[RoundScratch] = None
    pending: Optional[tuple] = None

    def __post_init__(self) -> None:
        self.grid = GridSpec(self.K, GridStyle.OFFSET)
        self.block = math.ceil(math.sqrt(self.T))
        self.T0 = (self.L + 1) * self.block
        self.levels = [LevelHistory(self.grid) for _ in range(self.L + 1)]
        self.level_of_round = np.full(self.T + 1, -1, dtype=np.int64)

    @property
    def log_term(self) -> float:
        return math.log(self.L * self.K * self.T)

    def level_counts(self) -> Dict[int, int]:
        return {level: len(hist) for level, hist in enumerate(self.levels)}


def ml_is_ucb_init(T: int, K: Optional[int] = None, L: Optional[int] = None, gamma: float = 3.0,
                   seed: Optional[int] = None) -> MlIsUcbState:
    """Fresh state with K = ceil(sqrt T), L = ceil(log2 T) unless overridden; needs T0 < T"""
    if T < 2:
        raise ConfigurationError(f"horizon must be at least 2, got {T}")
    K = K or math.ceil(math.sqrt(T))
    L = L or math.ceil(math.log2(T))
    if gamma <= 0:
        raise ConfigurationError(f"gamma must be positive, got {gamma}")
    T0 = (L + 1) * math.ceil(math.sqrt(T))
    if T0 >= T:
        raise ConfigurationError(f"ML-IS-UCB needs T0 = (L+1)*ceil(sqrt(T)) = {T0} < T = {T}")
    return MlIsUcbState(T=T, K=K, L=L, gamma=gamma, seed=seed)


def initialization_level(state: MlIsUcbState, t: int) -> int:
    """Level that forced-zero round t <= T0 belongs to"""
    return (t - 1) // state.block


def certificate_widths(state: MlIsUcbState, level: int, p_prev: np.ndarray) -> np.ndarray:
    """Widths at `level`; reads only the bids placed at that level, never its outcomes"""
    return level_widths(p_prev, state.levels[level].bid_counts(), state.gamma, state.log_term, state.T)


def ml_is_ucb_round(state: MlIsUcbState, t: int, value: float) -> int:
    """Choose the 0-based bid index for round t > T0 and assign t to a level"""
    if t <= state.T0 or state.p0 is None:
        raise ValueError(f"round {t} is inside the initialization phase (T0 = {state.T0})")
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"value must lie in [0, 1], got {value}")
    points = state.grid.points
    candidates = np.arange(state.K)
    p_prev = state.p0
    scratch = RoundScratch(t=t, level=-1)
    for level in range(1, state.L + 1):
        widths = certificate_widths(state, level, p_prev)
        scratch.candidates.append(candidates)
        scratch.widths.append(widths)
        wide = candidates[widths[candidates] > 2.0 ** (-level)]
        if wide.size:
            index = int(wide[0])
            state.level_of_round[t] = level
            state.pending = (t, level, index)
            scratch.level = level
            state.last_round = scratch
            return index
        estimates = state.levels[level].interval_estimates()
        scratch.estimates.append(estimates)
        rewards = (value - points) * (1.0 - tail_sums(estimates))
        upper = rewards[candidates] + widths[candidates]
        candidates = candidates[upper >= upper.max() - 2.0 * 2.0 ** (-level)]
        p_prev = estimates
    raise LevelExhaustedError(f"round {t} passed all {state.L} levels without a wide candidate")


def ml_is_ucb_observe(state: MlIsUcbState, t: int, index: int, outcome: CensoredOutcome) -> None:
    """File the outcome of round t under the level it was assigned to"""
    if t <= state.T0:
        level = initialization_level(state, t)
        state.level_of_round[t] = level
    else:
        if state.pending is None or state.pending[0] != t:
            raise ValueError(f"round {t} was never assigned to a level")
        level = state.pending[1]
        state.pending = None
    state.levels[level].record(t, index, outcome)
    if t == state.T0:
        state.p0 = state.levels[0].interval_estimates()
        logger.debug("initialization done after %d rounds; p0 sums to %.4f", t, float(state.p0.sum()))


class MlIsUcbBidder(AuctionPolicy):
    name = "ml_is_ucb"

    def __init__(self, T: int, gamma: float = 3.0, K: Optional[int] = None, L: Optional[int] = None,
                 seed: Optional[int] = None) -> None:
        self.state = ml_is_ucb_init(T, K, L, gamma, seed)
        self.grid = self.state.grid
        self._pending: Optional[int] = None

    def bid(self, t: int, value: float) -> float:
        if t <= self.state.T0:
            self._pending = 0
        else:
            self._pending = ml_is_ucb_round(self.state, t, value)
        return float(self.grid.points[self._pending])

    def observe(self, t: int, bid: float, outcome: CensoredOutcome) -> None:
        if self._pending is None:
            raise RuntimeError("observe called before bid")
        ml_is_ucb_observe(self.state, t, self._pending, outcome)
        self._pending = None

    def describe(self) -> Dict[str, Any]:
        info = super().describe()
        info.update({"L": self.state.L, "T0": self.state.T0, "gamma": self.state.gamma,
                     "level_counts": self.state.level_counts()})
        return info
