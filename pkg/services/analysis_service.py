"""Slope fits and closed-form regret bounds for reporting."""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from core.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass
class SlopeFit:
    T: List[int]
    mean_regret: List[float]
    slope: float
    intercept: float
    stderr: float
    rvalue: float

    def within(self, low: float, high: float) -> bool:
        return low <= self.slope <= high

    def to_dict(self) -> Dict[str, Any]:
        return {
            "T": list(self.T),
            "mean_regret": list(self.mean_regret),
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "r_squared": self.rvalue ** 2,
        }


def fit_slope(T_values: Sequence[int], mean_regrets: Sequence[float]) -> SlopeFit:
    """Least-squares slope of log(mean regret) on log(T).

    Needs at least 4 horizons spanning at least two octaves and strictly
    positive regrets.
    """
    T_arr = np.asarray(T_values, dtype=np.float64)
    r_arr = np.asarray(mean_regrets, dtype=np.float64)
    if T_arr.shape != r_arr.shape:
        raise ConfigurationError("T values and mean regrets must have the same length")
    if T_arr.size < 4:
        raise ConfigurationError(f"slope fit needs at least 4 horizons, got {T_arr.size}")
    if np.any(T_arr < 1):
        raise ConfigurationError("horizons must be positive")
    if T_arr.max() < 4.0 * T_arr.min():
        raise ConfigurationError(
            f"horizons {T_arr.min():g}..{T_arr.max():g} span less than two octaves")
    bad = [int(T) for T, r in zip(T_arr, r_arr) if not r > 0.0]
    if bad:
        raise ConfigurationError(f"mean regret is not positive at T = {bad}")

    fit = stats.linregress(np.log(T_arr), np.log(r_arr))
    logger.info("log-log slope %.3f (stderr %.3f) over %d horizons", fit.slope, fit.stderr, T_arr.size)
    return SlopeFit(
        T=[int(T) for T in T_arr],
        mean_regret=[float(r) for r in r_arr],
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        stderr=float(fit.stderr),
        rvalue=float(fit.rvalue),
    )


def mse_regret_bound(T: int, K: Optional[int] = None, M: Optional[int] = None, gamma: float = 3.0) -> float:
    """2 + 4 gamma log(KMT) (1 + log T) sqrt(T)"""
    K = K or math.ceil(math.sqrt(T))
    M = M or math.ceil(math.sqrt(T))
    return 2.0 + 4.0 * gamma * math.log(K * M * T) * (1.0 + math.log(T)) * math.sqrt(T)


def ml_is_ucb_regret_bound(T: int, K: Optional[int] = None, L: Optional[int] = None, gamma: float = 3.0) -> float:
    """4 + (L + 4) ceil(sqrt T) + 80 gamma log(LKT) (1 + log T) L sqrt(T)"""
    K = K or math.ceil(math.sqrt(T))
    L = L or math.ceil(math.log2(T))
    block = math.ceil(math.sqrt(T))
    return 4.0 + (L + 4) * block + 80.0 * gamma * math.log(L * K * T) * (1.0 + math.log(T)) * L * math.sqrt(T)


def two_point_floor(T: int) -> float:
    return math.sqrt(T) / (24.0 * math.e ** 2)


def lower_bound_floor(T: int, M: int) -> float:
    """Order of the contextual lower bound, T^{2/3} for M ~ T^{1/3}, with the constant left out"""
    return min(float(T), math.sqrt(M * T))


def lemma3_bound(T: int) -> float:
    """(1 + log T)^2"""
    return (1.0 + math.log(T)) ** 2


def record_breaking_sum(x: Sequence[float]) -> float:
    """sum_{t=2}^{T} 1 / (1 + #{2 <= s <= t-1 : x_s <= x_t}), 1-based"""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("record-breaking sum takes a 1-D sequence")
    tail = arr[1:]
    n = tail.size
    if n == 0:
        return 0.0
    # le[t, s] = x_s <= x_t restricted to s < t within the tail
    le = tail[None, :] <= tail[:, None]
    counts = np.tril(le, k=-1).sum(axis=1)
    return float(np.sum(1.0 / (1.0 + counts)))


def bound_for(policy: str, T: int, K: Optional[int] = None, M: Optional[int] = None,
              L: Optional[int] = None, gamma: float = 3.0) -> Optional[float]:
    if policy == "mse":
        return mse_regret_bound(T, K, M, gamma)
    if policy == "ml_is_ucb":
        return ml_is_ucb_regret_bound(T, K, L, gamma)
    return None


def bound_ratios(frame: pd.DataFrame, policy: str, gamma: float = 3.0) -> pd.DataFrame:
    """Adds bound and ratio columns to a per-T frame with columns T, mean"""
    ratios = frame.copy()
    ratios["bound"] = [bound_for(policy, int(T), gamma=gamma) for T in ratios["T"]]
    ratios["ratio"] = ratios["mean"] / ratios["bound"]
    return ratios


def lower_bound_ratios(frame: pd.DataFrame) -> pd.DataFrame:
    """mean / T^{2/3} per horizon; roughly flat when the lower bound is tight

    Frames that carry the context count M also get mean / min(T, sqrt(MT)).
    """
    ratios = frame.copy()
    ratios["scale"] = ratios["T"].astype(float) ** (2.0 / 3.0)
    ratios["ratio"] = ratios["mean"] / ratios["scale"]
    if "M" in ratios.columns:
        floors = [lower_bound_floor(int(T), int(M)) for T, M in zip(ratios["T"], ratios["M"])]
        ratios["floor_ratio"] = ratios["mean"] / np.asarray(floors)
    return ratios


def ratios_flat(ratios: Sequence[float], spread: float = 0.5) -> bool:
    """True when min(ratio) >= spread * max(ratio)"""
    arr = np.asarray(ratios, dtype=np.float64)
    return bool(arr.size > 0 and arr.min() >= spread * arr.max())
