"""Oblivious private-value schedules. A schedule never sees the bidder's actions."""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from core.distributions import BidDistribution, UniformDistribution, distribution_from_config
from core.errors import ConfigurationError

logger = logging.getLogger(__name__)

SCHEDULE_KINDS = ("iid", "constant", "decreasing", "decreasing_blocks", "explicit", "file")


def block_contexts(M: int, T: int) -> np.ndarray:
    """c_t = M + 1 - m on block m; when M does not divide T the last block takes the remainder"""
    if M < 1 or T < M:
        raise ConfigurationError(f"block schedule needs 1 <= M <= T, got M={M}, T={T}")
    if T % M:
        logger.warning("M=%d does not divide T=%d; the last block absorbs %d extra rounds", M, T, T % M)
    block = T // M
    m = np.minimum(np.arange(T) // block + 1, M)
    return (M + 1 - m).astype(np.int64)


@dataclass
class ValueSchedule:
    kind: str
    distribution: Optional[BidDistribution] = None
    value: Optional[float] = None
    M: Optional[int] = None
    values: Optional[List[float]] = None
    path: Optional[str] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in SCHEDULE_KINDS:
            raise ConfigurationError(f"unknown value schedule '{self.kind}'; expected one of {SCHEDULE_KINDS}")
        if self.kind == "constant" and (self.value is None or not 0.0 <= self.value <= 1.0):
            raise ConfigurationError(f"constant schedule needs a value in [0, 1], got {self.value}")
        if self.kind == "decreasing_blocks" and not self.M:
            raise ConfigurationError("decreasing_blocks schedule needs M")

    def draw(self, T: int, rng: np.random.Generator) -> np.ndarray:
        """The first T values; rng is the schedule's own stream"""
        if self.kind == "iid":
            dist = self.distribution or UniformDistribution()
            out = np.asarray(dist.sample(rng, T), dtype=np.float64)
        elif self.kind == "constant":
            out = np.full(T, float(self.value))  # type: ignore
        elif self.kind == "decreasing":
            out = 1.0 - np.arange(T, dtype=np.float64) / T
        elif self.kind == "decreasing_blocks":
            out = block_contexts(int(self.M), T) / float(self.M)  # type: ignore
        elif self.kind == "explicit":
            out = self._take(np.asarray(self.values, dtype=np.float64), T, "explicit list")
        else:
            out = self._take(read_value_file(str(self.path)), T, str(self.path))
        if np.any((out < 0.0) | (out > 1.0)) or not np.all(np.isfinite(out)):
            raise ConfigurationError(f"{self.kind} schedule produced values outside [0, 1]")
        return out

    def contexts(self, T: int) -> np.ndarray:
        """Integer contexts of a block schedule"""
        if self.kind != "decreasing_blocks":
            raise ConfigurationError(f"{self.kind} schedule has no integer contexts")
        return block_contexts(int(self.M), T)  # type: ignore

    @staticmethod
    def _take(values: np.ndarray, T: int, source: str) -> np.ndarray:
        if values.size < T:
            raise ConfigurationError(f"{source} holds {values.size} values but the horizon is {T}")
        return values[:T].copy()

    def to_config(self) -> Dict[str, Any]:
        config: Dict[str, Any] = {"kind": self.kind}
        if self.distribution is not None:
            config["distribution"] = self.distribution.to_config()
        for key in ("value", "M", "path"):
            if getattr(self, key) is not None:
                config[key] = getattr(self, key)
        if self.values is not None:
            config["n_values"] = len(self.values)
        return config


def read_value_file(path: str) -> np.ndarray:
    """One decimal value per line"""
    try:
        frame = pd.read_csv(path, header=None, names=["value"], dtype=np.float64)
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigurationError(f"could not parse value file {path}: {str(e)}")
    return frame["value"].to_numpy()


def make_block_schedule(M: int, T: int) -> ValueSchedule:
    block_contexts(M, T)
    return ValueSchedule(kind="decreasing_blocks", M=M)


def schedule_from_config(name: str, params: Optional[Dict[str, Any]] = None) -> ValueSchedule:
    """CLI names: iid_uniform, iid_<family>, constant, decreasing, decreasing_blocks, explicit, file"""
    params = params or {}
    if name == "iid_uniform":
        return ValueSchedule(kind="iid", distribution=UniformDistribution())
    if name.startswith("iid_"):
        family = {"family": name[len("iid_"):], **params.get("value_distribution", {})}
        return ValueSchedule(kind="iid", distribution=distribution_from_config(family))
    if name == "iid":
        return ValueSchedule(kind="iid", distribution=distribution_from_config(params.get("value_distribution", {})))
    if name == "constant":
        return ValueSchedule(kind="constant", value=float(params.get("value", 1.0)))
    if name == "decreasing":
        return ValueSchedule(kind="decreasing")
    if name == "decreasing_blocks":
        if params.get("M") is None:
            raise ConfigurationError("decreasing_blocks values need M")
        return ValueSchedule(kind="decreasing_blocks", M=int(params["M"]))
    if name == "explicit":
        return ValueSchedule(kind="explicit", values=list(params.get("values", [])))
    if name == "file":
        if not params.get("value_file"):
            raise ConfigurationError("file values need value_file")
        return ValueSchedule(kind="file", path=str(params["value_file"]))
    raise ConfigurationError(f"unknown value schedule '{name}'")
