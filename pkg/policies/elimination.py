"""Monotone successive elimination (MSE) for monotone group contextual bandits.

Contexts are 1..M, actions 1..K. Choosing action a under any context reveals
the rewards of every (context, action >= a) pair. The learner always plays
the smallest surviving action of the current context and prunes with two
rules: (1) nothing below min A_{c-1} survives in A_c, (2) confidence-band
elimination against the empirical best of A_c.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from core.errors import ConfigurationError, FeedbackShapeError

logger = logging.getLogger(__name__)


def empirical_leader_counts(means: np.ndarray, counts: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Row-wise (max mean over active, count of that leader); mean ties go to the larger count"""
    masked = np.where(active, means, -np.inf)
    best = masked.max(axis=1)
    leaders = active & (masked == best[:, None])
    n_best = np.where(leaders, counts, 0).max(axis=1)
    return np.stack([best, n_best.astype(np.float64)], axis=1)


def band_survivors(means: np.ndarray, counts: np.ndarray, active: np.ndarray, scale: float) -> np.ndarray:
    """Drop a from each row iff mean_a < mean_max - scale * (n_a^-1/2 + n_max^-1/2)"""
    leader = empirical_leader_counts(means, counts, active)
    best, n_best = leader[:, 0], np.maximum(leader[:, 1], 1.0)
    n = np.maximum(counts, 1).astype(np.float64)
    threshold = best[:, None] - scale * (1.0 / np.sqrt(n) + 1.0 / np.sqrt(n_best)[:, None])
    return active & ~(means < threshold)


@dataclass
class MseState:
    M: int
    K: int
    T: int
    gamma: float
    active: np.ndarray = field(init=False)
    means: np.ndarray = field(init=False)
    counts: np.ndarray = field(init=False)
    visits_at_or_below: np.ndarray = field(init=False)
    rounds: int = 0

    def __post_init__(self) -> None:
        if self.M < 1 or self.K < 1 or self.T < 1:
            raise ConfigurationError(f"M, K, T must be positive, got {(self.M, self.K, self.T)}")
        if self.gamma <= 0:
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")
        self.active = np.ones((self.M, self.K), dtype=bool)
        self.means = np.zeros((self.M, self.K), dtype=np.float64)
        self.counts = np.zeros((self.M, self.K), dtype=np.int64)
        # sum over rounds s >= 2 of 1(c_s <= c), indexed by c - 1
        self.visits_at_or_below = np.zeros(self.M, dtype=np.int64)

    @property
    def band_scale(self) -> float:
        return self.gamma * math.log(self.K * self.M * self.T)

    def min_actions(self) -> np.ndarray:
        """1-based min A_c for every context"""
        return np.argmax(self.active, axis=1) + 1

    def count_bound_holds(self) -> bool:
        required = 1 + self.visits_at_or_below[:, None]
        return bool(np.all(self.counts[self.active] >= np.broadcast_to(required, self.active.shape)[self.active]))


class MonotoneSuccessiveElimination:
    """Generic MSE learner; feed it any monotone group contextual bandit"""

    def __init__(self, M: int, K: int, T: int, gamma: float = 3.0, sequential: bool = False) -> None:
        self.state = MseState(M, K, T, gamma)
        self.sequential = sequential

    def choose(self, context: int) -> int:
        """Smallest surviving action of the context (1-based)"""
        if not 1 <= context <= self.state.M:
            raise ValueError(f"context must lie in [1, {self.state.M}], got {context}")
        return int(np.argmax(self.state.active[context - 1])) + 1

    def observe(self, context: int, action: int, rewards: np.ndarray) -> None:
        """rewards[c-1, j] is the revealed reward of (c, action + j) for every context c"""
        st = self.state
        rewards = np.asarray(rewards, dtype=np.float64)
        expected_shape = (st.M, st.K - action + 1)
        if not 1 <= action <= st.K or rewards.shape != expected_shape:
            raise FeedbackShapeError(
                f"reveal for action {action} must have shape {expected_shape}, got {rewards.shape}"
            )
        if not np.all(np.isfinite(rewards)):
            raise FeedbackShapeError("revealed rewards must be finite")

        cols = slice(action - 1, None)
        n_old = st.counts[:, cols].astype(np.float64)
        st.means[:, cols] = n_old / (n_old + 1.0) * st.means[:, cols] + rewards / (n_old + 1.0)
        st.counts[:, cols] += 1
        st.rounds += 1
        if st.rounds >= 2:
            st.visits_at_or_below[context - 1:] += 1

        if self.sequential:
            st.active = self._eliminate_sequential()
        else:
            st.active = self._eliminate_vectorized()

    def _eliminate_sequential(self) -> np.ndarray:
        """Context-by-context pass, literally as the elimination loop reads"""
        st = self.state
        active = st.active.copy()
        floor = 0
        for c in range(st.M):
            row = active[c].copy()
            row[:floor] = False
            if not row.any():
                logger.debug("context %d emptied by the monotone rule; keeping action %d", c + 1, floor + 1)
                row[floor] = True
            row = band_survivors(st.means[c:c + 1], st.counts[c:c + 1], row[None, :], st.band_scale)[0]
            active[c] = row
            floor = int(np.argmax(row))
        return active

    def _eliminate_vectorized(self) -> np.ndarray:
        """Same result as the sequential pass, iterated over all contexts at once until the floors settle"""
        st = self.state
        cols = np.arange(st.K)[None, :]
        floors = np.concatenate(([0], np.argmax(st.active, axis=1)[:-1]))
        for _ in range(st.M + 1):
            pruned = st.active & (cols >= floors[:, None])
            emptied = ~pruned.any(axis=1)
            if emptied.any():
                pruned[np.flatnonzero(emptied), floors[emptied]] = True
            survivors = band_survivors(st.means, st.counts, pruned, st.band_scale)
            new_floors = np.concatenate(([0], np.argmax(survivors, axis=1)[:-1]))
            if np.array_equal(new_floors, floors):
                return survivors
            floors = new_floors
        raise AssertionError("monotone elimination floors failed to settle")

