import math
from dataclasses import dataclass, field

import numpy as np

from core.errors import ConfigurationError, FeedbackShapeError
from core.grids import GridSpec
from inventory.newsvendor import downward_reveal, order_grid
from policies.elimination import band_survivors


@dataclass
class InventoryMseState:
    T: int
    gamma: float
    grid: GridSpec = field(init=False)
    active: np.ndarray = field(init=False)
    means: np.ndarray = field(init=False)
    counts: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if self.T < 2:
            raise ConfigurationError(f"horizon must be at least 2, got {self.T}")
        self.grid = order_grid(self.T)
        K = self.grid.K
        self.active = np.ones(K, dtype=bool)
        self.means = np.zeros(K, dtype=np.float64)
        self.counts = np.zeros(K, dtype=np.int64)

    @property
    def band_scale(self) -> float:
        # log T, not log(KT): this is the band the inventory variant prints
        return self.gamma * math.log(self.T)


class InventoryMse:
    """Single-context MSE that orders the largest surviving level; feedback flows downward"""

    name = "inventory_mse"

    def __init__(self, T: int, gamma: float = 3.0) -> None:
        self.state = InventoryMseState(T, gamma)

    @property
    def grid(self) -> GridSpec:
        return self.state.grid

    def choose(self) -> int:
        """1-based index of max A"""
        return int(np.flatnonzero(self.state.active)[-1]) + 1

    def order_level(self, action: int) -> float:
        return float(self.grid.points[action - 1])

    def observe_rewards(self, action: int, rewards: np.ndarray) -> None:
        """rewards[j] belongs to level j+1, for every level <= action"""
        st = self.state
        rewards = np.asarray(rewards, dtype=np.float64)
        if rewards.shape != (action,):
            raise FeedbackShapeError(f"downward reveal for action {action} must have {action} entries")
        n_old = st.counts[:action].astype(np.float64)
        st.means[:action] = n_old / (n_old + 1.0) * st.means[:action] + rewards / (n_old + 1.0)
        st.counts[:action] += 1
        st.active = band_survivors(st.means[None, :], st.counts[None, :], st.active[None, :], st.band_scale)[0]

    def observe(self, action: int, sale: float, p: float, h: float) -> None:
        levels = self.grid.points[:action]
        self.observe_rewards(action, downward_reveal(self.order_level(action), sale, levels, p, h))

    def best_level(self) -> float:
        """Surviving level with the highest empirical mean (largest level on ties)"""
        st = self.state
        masked = np.where(st.active, st.means, -np.inf)
        idx = int(np.flatnonzero(masked == masked.max())[-1])
        return float(self.grid.points[idx])
