"""Repeated newsvendor with censored demand.

Only min(a_t, d_t) is seen. The realized reward p*min(a, d) - h*(a - d)^+ is
computable from that censored sale for every order level a <= a_t, which
is what makes the problem a (downward) monotone bandit.
"""
import math
from typing import Tuple

import numpy as np

from core.distributions import BidDistribution
from core.errors import ConfigurationError
from core.feedback import check_price
from core.grids import GridSpec, GridStyle


def order_grid(T: int) -> GridSpec:
    """Order levels {1/K, ..., 1} with K = ceil(sqrt T)"""
    return GridSpec(math.ceil(math.sqrt(T)), GridStyle.UNIT)


def _check_costs(p: float, h: float) -> None:
    if p < 0 or h < 0:
        raise ConfigurationError(f"price and overage cost must be non-negative, got p={p}, h={h}")


def inventory_reward(a: float, d: float, p: float, h: float) -> float:
    check_price("order level", a)
    check_price("demand", d)
    return p * min(a, d) - h * max(a - d, 0.0)


def downward_reveal(a_t: float, observed: float, levels: np.ndarray, p: float, h: float) -> np.ndarray:
    """Rewards of every queried level a <= a_t, rebuilt from the censored sale min(a_t, d_t)"""
    levels = np.asarray(levels, dtype=np.float64)
    if observed > a_t:
        raise ValueError(f"censored sale {observed} exceeds the order level {a_t}")
    if np.any(levels > a_t):
        raise ValueError(f"downward reveal only covers levels <= {a_t}")
    return p * np.minimum(levels, observed) - h * np.maximum(levels - observed, 0.0)


def expected_inventory_reward(levels: np.ndarray, demand: BidDistribution, p: float, h: float) -> np.ndarray:
    """p E[min(a, d)] - h E[(a - d)^+] = p a - (p + h) int_0^a F"""
    levels = np.atleast_1d(np.asarray(levels, dtype=np.float64))
    integrated = np.array([demand.integrated_cdf(float(a)) for a in levels])
    return p * levels - (p + h) * integrated


def newsvendor_quantile(demand: BidDistribution, p: float, h: float) -> float:
    """Optimal continuous order level: the p/(p+h) quantile of demand"""
    _check_costs(p, h)
    if p + h == 0:
        raise ConfigurationError("p + h must be positive")
    return float(demand.quantile(p / (p + h)))


class InventoryEnv:
    def __init__(self, demand: BidDistribution, p: float, h: float, rng: np.random.Generator) -> None:
        _check_costs(p, h)
        self.demand = demand
        self.p = float(p)
        self.h = float(h)
        self.rng = rng
        self._d = np.empty(0)

    def reset(self, T: int) -> None:
        self._d = np.asarray(self.demand.sample(self.rng, T), dtype=np.float64)

    def step(self, t: int, a: float) -> Tuple[float, float]:
        """(censored sale min(a, d_t), true d_t for the harness)"""
        check_price("order level", a)
        d = float(self._d[t - 1])
        return min(a, d), d

    def expected_cost(self, levels: np.ndarray) -> np.ndarray:
        """h E[(a - d)^+] + p E[(d - a)^+] = p E[d] - reward"""
        return self.p * self.demand.mean() - expected_inventory_reward(levels, self.demand, self.p, self.h)
