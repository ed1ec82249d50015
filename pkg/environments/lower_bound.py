"""Hard monotone group contextual bandit with K = 2M actions and Bernoulli rewards.

Under sign vector eps, context c prefers action 2c when eps_c = +1 and 2c-1
when eps_c = -1. Played against a non-increasing block context schedule,
any learner pays order T^{2/3} regret.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np

from core.errors import ConfigurationError


def mean_reward_matrix(eps: np.ndarray, K: int) -> np.ndarray:
    """R[c-1, a-1] = 3/4 - |a + 1/2 - 2c| / (2K), except 3/4 - (eps_c + 1)/(4K) at a = 2c - 1"""
    M = eps.shape[0]
    c = np.arange(1, M + 1, dtype=np.float64)[:, None]
    a = np.arange(1, K + 1, dtype=np.float64)[None, :]
    means = 0.75 - np.abs(a + 0.5 - 2.0 * c) / (2.0 * K)
    rows = np.arange(M)
    special = 2 * np.arange(1, M + 1) - 1
    inside = special <= K
    means[rows[inside], special[inside] - 1] = 0.75 - (eps[inside] + 1.0) / (4.0 * K)
    return means


@dataclass
class LowerBoundInstance:
    M: int
    eps: np.ndarray
    K: Optional[int] = None
    means: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.eps = np.asarray(self.eps, dtype=np.float64)
        if self.eps.shape != (self.M,) or not np.all(np.isin(self.eps, (-1.0, 1.0))):
            raise ConfigurationError(f"eps must be a vector of M={self.M} signs")
        self.K = self.K or 2 * self.M
        if self.K < 2 * self.M:
            raise ConfigurationError(f"lower-bound instance needs K >= 2M, got K={self.K}, M={self.M}")
        self.means = mean_reward_matrix(self.eps, self.K)

    @classmethod
    def mixture(cls, M: int, rng: np.random.Generator, K: Optional[int] = None) -> "LowerBoundInstance":
        """eps drawn uniformly from {+-1}^M"""
        return cls(M, rng.choice(np.array([-1.0, 1.0]), size=M), K)

    @classmethod
    def fixed(cls, eps: Sequence[float], K: Optional[int] = None) -> "LowerBoundInstance":
        return cls(len(eps), np.asarray(eps, dtype=np.float64), K)

    def best_actions(self) -> np.ndarray:
        """1-based argmax_a R[c, a] per context (largest on ties)"""
        flipped = self.means[:, ::-1]
        return self.K - np.argmax(flipped, axis=1)  # type: ignore

    def optimal_means(self) -> np.ndarray:
        return self.means.max(axis=1)

    def lipschitz_in_actions(self) -> bool:
        """|R[c,a] - R[c,a']| <= |a - a'| / K for all pairs"""
        diffs = np.abs(self.means[:, :, None] - self.means[:, None, :])
        gaps = np.abs(np.arange(self.K)[:, None] - np.arange(self.K)[None, :]) / self.K
        return bool(np.all(diffs <= gaps[None, :, :] + 1e-12))

    def lipschitz_in_contexts(self) -> bool:
        """|R[c,a] - R[c',a]| <= |c - c'| / M for all pairs"""
        diffs = np.abs(self.means[:, None, :] - self.means[None, :, :])
        gaps = np.abs(np.arange(self.M)[:, None] - np.arange(self.M)[None, :]) / self.M
        return bool(np.all(diffs <= gaps[:, :, None] + 1e-12))

    def to_config(self) -> Dict[str, Any]:
        return {"M": self.M, "K": self.K, "eps": self.eps.astype(int).tolist()}


def lower_bound_reveal(instance: LowerBoundInstance, context: int, action: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli rewards for every (c, a >= action)"""
    if not 1 <= action <= instance.K:  # type: ignore
        raise ValueError(f"action must lie in [1, {instance.K}], got {action}")
    block = instance.means[:, action - 1:]
    return (rng.random(block.shape) < block).astype(np.float64)
