"""Exact reward and oracle computations for a first-price auction with value v and bid b."""
import math
from typing import Iterable, Tuple

import numpy as np

from core.distributions import BidDistribution
from core.feedback import RewardQuery, check_price
from core.grids import GridSpec, GridStyle

_ORACLE_CHUNK = 4096


def instantaneous_reward(v: float, b: float, m: float) -> float:
    """(v - b) * 1(b >= m); a tie is a win"""
    check_price("value", v)
    check_price("bid", b)
    check_price("competing bid", m)
    return (v - b) if b >= m else 0.0


def expected_reward(q: RewardQuery, G: BidDistribution) -> float:
    return float((q.value - q.bid) * G.cdf(q.bid))


def expected_rewards(v: float, G: BidDistribution, points: np.ndarray) -> np.ndarray:
    """Vector of (v - b) G(b) over the given bid points"""
    return (v - points) * G.cdf(points)


def largest_argmax(rewards: np.ndarray) -> int:
    return int(np.flatnonzero(rewards == rewards.max())[-1])


def oracle_best_bid(v: float, G: BidDistribution, grid: GridSpec) -> Tuple[float, float]:
    """Best grid bid for value v when G is known; ties go to the largest maximizer"""
    check_price("value", v)
    points = grid.points
    rewards = expected_rewards(v, G, points)
    idx = largest_argmax(rewards)
    return float(points[idx]), float(rewards[idx])


def oracle_best_bid_scan(v: float, G: BidDistribution, grid: GridSpec) -> Tuple[float, float]:
    """Point-by-point version of oracle_best_bid, kept as an independent cross-check"""
    best_bid, best_reward = None, -math.inf
    for b in grid.points:
        r = expected_reward(RewardQuery(v, float(b)), G)
        if r >= best_reward:
            best_bid, best_reward = float(b), r
    return best_bid, best_reward  # type: ignore


def oracle_reward_curve(values: np.ndarray, G: BidDistribution, grid: GridSpec) -> np.ndarray:
    """max_b (v_t - b) G(b) over the grid, for every v_t"""
    values = np.asarray(values, dtype=np.float64)
    points = grid.points
    cdf_at = G.cdf(points)
    out = np.empty(values.shape[0], dtype=np.float64)
    for start in range(0, values.shape[0], _ORACLE_CHUNK):
        block = values[start:start + _ORACLE_CHUNK]
        out[start:start + block.shape[0]] = ((block[:, None] - points[None, :]) * cdf_at[None, :]).max(axis=1)
    return out


def oracle_trajectory_reward(values: Iterable[float], G: BidDistribution, grid: GridSpec) -> float:
    values_arr = np.fromiter(values, dtype=np.float64)
    if values_arr.size == 0:
        return 0.0
    if np.any((values_arr < 0.0) | (values_arr > 1.0)):
        raise ValueError("all values must lie in [0, 1]")
    return float(oracle_reward_curve(values_arr, G, grid).sum())


def quantize_index(v: float, M: int) -> int:
    """1-based index k of the smallest k/M >= v"""
    check_price("value", v)
    points = GridSpec(M, GridStyle.UNIT).points
    return int(np.searchsorted(points, v, side="left")) + 1


def quantize_value(v: float, M: int) -> float:
    return quantize_index(v, M) / M


def quantization_regret_gap(M: float, K: float, T: float) -> float:
    """(2/M + 1/K) T: the extra regret paid for running a policy on the quantized problem"""
    if M <= 0 or K <= 0 or T <= 0:
        raise ValueError(f"M, K and T must be positive, got {(M, K, T)}")
    return (2.0 / M + 1.0 / K) * T
