"""Episode runner and replication manager.

Regret is expected regret: every round is charged
max_b R(v_t, b) - R(v_t, b_t) computed from the true G (or the true mean
rewards of an abstract instance), never from realized payoffs.
"""
import hashlib
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from core.distributions import BidDistribution, distribution_from_config
from core.errors import ConfigurationError, EpisodeError, SimulationError
from core.rewards import oracle_reward_curve
from environments.auction_env import AuctionEnv
from environments.lower_bound import LowerBoundInstance, lower_bound_reveal
from environments.schedules import block_contexts, schedule_from_config
from inventory.newsvendor import InventoryEnv, expected_inventory_reward, inventory_reward, newsvendor_quantile
from inventory.policy import InventoryMse
from policies.elimination import MonotoneSuccessiveElimination
from policies.factory import PolicySpec, build_policy

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = ("auction", "lowerbound", "inventory")


def default_checkpoints(T: int) -> List[int]:
    """Powers of two up to T, plus T itself"""
    points = [2 ** k for k in range(int(math.log2(T)) + 1) if 2 ** k <= T]
    if points[-1] != T:
        points.append(T)
    return points


def replication_seed(base_seed: int, replication: int) -> int:
    """Stable 63-bit seed for (base seed, replication id)"""
    digest = hashlib.blake2b(f"{base_seed}:{replication}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


def episode_streams(seed: int) -> Dict[str, np.random.Generator]:
    """Independent generators so the schedule never touches the auction stream"""
    schedule, auction, instance = np.random.SeedSequence(seed).spawn(3)
    return {
        "schedule": np.random.default_rng(schedule),
        "auction": np.random.default_rng(auction),
        "instance": np.random.default_rng(instance),
    }


@dataclass
class ExperimentConfig:
    policy: PolicySpec
    T: int
    kind: str = "auction"
    env: Dict[str, Any] = field(default_factory=lambda: {"family": "uniform"})
    values: str = "iid_uniform"
    value_params: Dict[str, Any] = field(default_factory=dict)
    reps: int = 1
    seed: int = 0
    checkpoints: Optional[List[int]] = None
    workers: int = 1
    oracle_refine: int = 1
    M: Optional[int] = None
    K: Optional[int] = None
    fixed_eps: Optional[List[int]] = None
    p: float = 1.0
    h: float = 1.0
    out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigurationError(f"unknown experiment kind '{self.kind}'")
        if int(self.T) != self.T or self.T < 2:
            raise ConfigurationError(f"T must be an integer >= 2, got {self.T}")
        if self.reps < 1:
            raise ConfigurationError(f"reps must be >= 1, got {self.reps}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if self.oracle_refine < 1:
            raise ConfigurationError(f"oracle_refine must be >= 1, got {self.oracle_refine}")
        if self.kind == "auction" and self.env.get("family") == "two_point" and self.oracle_refine % 3:
            # a refined grid of K * 3r points holds the atoms 1/3 and 2/3 for every K
            logger.info("two-point oracle grid refined by %d instead of %d", 3 * self.oracle_refine,
                        self.oracle_refine)
            self.oracle_refine *= 3
        if self.checkpoints is None:
            self.checkpoints = default_checkpoints(self.T)
        cps = list(self.checkpoints)
        if not cps or cps != sorted(set(cps)) or cps[0] < 1 or cps[-1] > self.T:
            raise ConfigurationError(f"checkpoints must be sorted, distinct and within [1, {self.T}]")
        if self.kind == "auction":
            self.policy.validate_horizon(self.T)
        elif self.policy.policy != "mse":
            raise ConfigurationError(f"{self.kind} experiments run MSE only, got '{self.policy.policy}'")

    def lower_bound_shape(self) -> Tuple[int, int]:
        if self.fixed_eps is not None:
            M = len(self.fixed_eps)
        else:
            M = self.M or math.ceil(self.T ** (1.0 / 3.0) - 1e-9)
        return M, self.K or 2 * M

    def to_config(self) -> Dict[str, Any]:
        config = asdict(self)
        config["policy"] = self.policy.to_config()
        return {k: v for k, v in config.items() if v is not None}


@dataclass
class RegretTrace:
    replication: int
    seed: int
    checkpoints: List[int]
    cum_regret: np.ndarray
    cum_realized: np.ndarray
    wall_clock: float
    oracle_total: float
    metadata: Dict[str, Any] = field(default_factory=dict)
    extra: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.cum_regret)):
            raise ValueError("regret trace contains non-finite values")

    @property
    def final_regret(self) -> float:
        return float(self.cum_regret[-1])

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.cum_regret) >= -1e-9))


def _finish_trace(config: ExperimentConfig, replication: int, seed: int, regret: np.ndarray,
                  realized: np.ndarray, started: float, oracle_total: float, metadata: Dict[str, Any],
                  extra: Optional[Dict[str, np.ndarray]] = None) -> RegretTrace:
    if not np.all(np.isfinite(regret)):
        raise FloatingPointError("per-round regret is NaN or infinite")
    if np.any(regret < -1e-12):
        raise FloatingPointError(f"negative per-round regret {regret.min()}")
    idx = np.asarray(config.checkpoints) - 1
    extra_cum = {name: np.cumsum(values)[idx] for name, values in (extra or {}).items()}
    return RegretTrace(
        replication=replication,
        seed=seed,
        checkpoints=list(config.checkpoints),  # type: ignore
        cum_regret=np.cumsum(np.maximum(regret, 0.0))[idx],
        cum_realized=np.cumsum(realized)[idx],
        wall_clock=time.perf_counter() - started,
        oracle_total=oracle_total,
        metadata=metadata,
        extra=extra_cum,
    )


def _auction_episode(config: ExperimentConfig, replication: int, seed: int) -> RegretTrace:
    started = time.perf_counter()
    streams = episode_streams(seed)
    T = config.T
    G: BidDistribution = distribution_from_config({"seed": config.seed, **config.env})
    schedule = schedule_from_config(config.values, {"M": config.M, **config.value_params})
    values = schedule.draw(T, streams["schedule"])
    env = AuctionEnv(G, schedule, streams["auction"])
    env.reset(T)
    policy = build_policy(config.policy, T, G)

    bids = np.empty(T, dtype=np.float64)
    realized = np.zeros(T, dtype=np.float64)
    for t in range(1, T + 1):
        v = float(values[t - 1])
        b = policy.bid(t, v)
        outcome, _ = env.step(t, b)
        policy.observe(t, b, outcome)
        bids[t - 1] = b
        if outcome.won:
            realized[t - 1] = v - b

    oracle = oracle_reward_curve(values, G, policy.grid.refine(config.oracle_refine))
    regret = oracle - (values - bids) * G.cdf(bids)
    metadata = {"policy": policy.describe(), "env": G.to_config(), "values": schedule.to_config()}
    if "level_counts" in metadata["policy"]:
        logger.debug("replication %d level histogram %s", replication, metadata["policy"]["level_counts"])
    return _finish_trace(config, replication, seed, regret, realized, started, float(oracle.sum()), metadata)


def _lowerbound_episode(config: ExperimentConfig, replication: int, seed: int) -> RegretTrace:
    started = time.perf_counter()
    streams = episode_streams(seed)
    T = config.T
    M, K = config.lower_bound_shape()
    if config.fixed_eps is not None:
        instance = LowerBoundInstance.fixed(config.fixed_eps, K)
    else:
        instance = LowerBoundInstance.mixture(M, streams["instance"], K)
    contexts = block_contexts(instance.M, T)
    learner = MonotoneSuccessiveElimination(instance.M, instance.K, T, config.policy.gamma)  # type: ignore
    best = instance.optimal_means()

    regret = np.empty(T, dtype=np.float64)
    realized = np.empty(T, dtype=np.float64)
    for t in range(1, T + 1):
        c = int(contexts[t - 1])
        a = learner.choose(c)
        rewards = lower_bound_reveal(instance, c, a, streams["auction"])
        learner.observe(c, a, rewards)
        regret[t - 1] = best[c - 1] - instance.means[c - 1, a - 1]
        realized[t - 1] = rewards[c - 1, 0]

    metadata = {
        "instance": instance.to_config(),
        "gamma": config.policy.gamma,
        "surviving": int(learner.state.active.sum()),
        "best_retained": bool(learner.state.active[np.arange(instance.M), instance.best_actions() - 1].all()),
    }
    return _finish_trace(config, replication, seed, regret, realized, started,
                         float(best[contexts - 1].sum()), metadata)


def _inventory_episode(config: ExperimentConfig, replication: int, seed: int) -> RegretTrace:
    started = time.perf_counter()
    streams = episode_streams(seed)
    T = config.T
    demand = distribution_from_config({"seed": config.seed, **config.env})
    env = InventoryEnv(demand, config.p, config.h, streams["auction"])
    env.reset(T)
    learner = InventoryMse(T, config.policy.gamma)
    expected = expected_inventory_reward(learner.grid.points, demand, config.p, config.h)
    costs = env.expected_cost(learner.grid.points)
    best = float(expected.max())

    regret = np.empty(T, dtype=np.float64)
    realized = np.empty(T, dtype=np.float64)
    cost = np.empty(T, dtype=np.float64)
    for t in range(1, T + 1):
        a = learner.choose()
        level = learner.order_level(a)
        sale, d = env.step(t, level)
        learner.observe(a, sale, config.p, config.h)
        regret[t - 1] = best - expected[a - 1]
        realized[t - 1] = inventory_reward(level, d, config.p, config.h)
        cost[t - 1] = costs[a - 1]

    metadata = {
        "demand": demand.to_config(),
        "p": config.p,
        "h": config.h,
        "best_level": learner.best_level(),
        "surviving": int(learner.state.active.sum()),
        "newsvendor_quantile": newsvendor_quantile(demand, config.p, config.h),
    }
    return _finish_trace(config, replication, seed, regret, realized, started, best * T, metadata,
                         extra={"cum_cost": cost})


_EPISODES = {
    "auction": _auction_episode,
    "lowerbound": _lowerbound_episode,
    "inventory": _inventory_episode,
}


def run_episode(config: ExperimentConfig, replication: int) -> RegretTrace:
    """One replication; deterministic given (config.seed, replication)"""
    seed = replication_seed(config.seed, replication)
    try:
        trace = _EPISODES[config.kind](config, replication, seed)
    except ConfigurationError:
        raise
    except (SimulationError, FloatingPointError, ValueError, RuntimeError, AssertionError) as e:
        raise EpisodeError(str(e), replication, seed, e)
    logger.debug("replication %d (seed %d) final regret %.4f in %.2fs",
                 replication, seed, trace.final_regret, trace.wall_clock)
    return trace


def _episode_job(job: Tuple[ExperimentConfig, int]) -> RegretTrace:
    return run_episode(*job)


@dataclass
class ReplicationResult:
    config: ExperimentConfig
    traces: List[RegretTrace]
    summary: pd.DataFrame

    @property
    def final_mean(self) -> float:
        return float(self.summary["mean"].iloc[-1])

    @property
    def final_std(self) -> float:
        return float(self.summary["std"].iloc[-1])


def traces_frame(traces: List[RegretTrace]) -> pd.DataFrame:
    """Long format rep, t, cum_regret, cum_realized (+ extra columns)"""
    frames = []
    for trace in traces:
        frame = pd.DataFrame({
            "rep": trace.replication,
            "t": trace.checkpoints,
            "cum_regret": trace.cum_regret,
            "cum_realized": trace.cum_realized,
        })
        for name, values in trace.extra.items():
            frame[name] = values
        frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=["rep", "t", "cum_regret", "cum_realized"])
    return pd.concat(frames, ignore_index=True)


def summarize(frame: pd.DataFrame, T: int) -> pd.DataFrame:
    """Per-checkpoint mean, std (0 for a single replication) and count"""
    if frame.empty:
        return pd.DataFrame(columns=["T", "checkpoint", "mean", "std", "n"])
    grouped = frame.sort_values(["rep", "t"]).groupby("t", sort=True)["cum_regret"]
    summary = grouped.agg(["mean", "std", "count"]).reset_index()
    summary = summary.rename(columns={"t": "checkpoint", "count": "n"})
    summary["std"] = summary["std"].fillna(0.0)
    summary.insert(0, "T", T)
    return summary[["T", "checkpoint", "mean", "std", "n"]]


def run_replications(config: ExperimentConfig) -> ReplicationResult:
    """config.reps independent episodes; the reduction runs in replication order"""
    logger.info("running %s/%s T=%d reps=%d workers=%d", config.kind, config.policy.policy,
                config.T, config.reps, config.workers)
    jobs = [(config, rep) for rep in range(config.reps)]
    if config.workers > 1 and config.reps > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            traces = list(pool.map(_episode_job, jobs))
    else:
        traces = [_episode_job(job) for job in jobs]
    traces.sort(key=lambda trace: trace.replication)
    summary = summarize(traces_frame(traces), config.T)
    logger.info("T=%d mean final regret %.4f", config.T, float(summary["mean"].iloc[-1]))
    return ReplicationResult(config=config, traces=traces, summary=summary)
