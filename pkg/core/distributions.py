"""Distributions on [0, 1] for the others' highest bid m_t (and for newsvendor demand).

Every family exposes an exact ``cdf``, an inverse-CDF ``sample`` driven by a
caller-owned ``numpy.random.Generator``, and ``integrated_cdf(a)`` which is
the integral of G over [0, a] (needed for expected newsvendor rewards).
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy import integrate, stats  # type: ignore

from core.errors import ConfigurationError


class BidDistribution(ABC):
    family: str = "abstract"

    @abstractmethod
    def cdf(self, b: Any) -> Any:
        """G(b), vectorized, right-continuous, G(1) = 1"""

    @abstractmethod
    def quantile(self, q: Any) -> Any:
        """Smallest x in [0, 1] with G(x) >= q"""

    @abstractmethod
    def to_config(self) -> Dict[str, Any]:
        """Structured config entry that rebuilds this distribution"""

    def sample(self, rng: np.random.Generator, size: Optional[int] = None) -> Any:
        u = rng.random(size)
        return self.quantile(u)

    def integrated_cdf(self, a: float) -> float:
        if a <= 0.0:
            return 0.0
        value, _ = integrate.quad(lambda x: float(self.cdf(x)), 0.0, min(a, 1.0), limit=200)
        return float(value) + max(a - 1.0, 0.0)

    def mean(self) -> float:
        return 1.0 - self.integrated_cdf(1.0)

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.to_config().items() if k != "family")
        return f"{type(self).__name__}({params})"


class UniformDistribution(BidDistribution):
    family = "uniform"

    def cdf(self, b: Any) -> Any:
        return np.clip(b, 0.0, 1.0)

    def quantile(self, q: Any) -> Any:
        return np.clip(q, 0.0, 1.0)

    def integrated_cdf(self, a: float) -> float:
        a_in = min(max(a, 0.0), 1.0)
        return 0.5 * a_in * a_in + max(a - 1.0, 0.0)

    def to_config(self) -> Dict[str, Any]:
        return {"family": self.family}


class AtomicDistribution(BidDistribution):
    """Piecewise-constant CDF: jumps of size masses[k] at atoms[k]"""

    family = "piecewise"

    def __init__(self, atoms: Sequence[float], masses: Sequence[float]) -> None:
        atoms_arr = np.asarray(atoms, dtype=np.float64)
        masses_arr = np.asarray(masses, dtype=np.float64)
        if atoms_arr.ndim != 1 or atoms_arr.size == 0 or atoms_arr.shape != masses_arr.shape:
            raise ConfigurationError("atoms and masses must be non-empty arrays of equal length")
        if np.any(np.diff(atoms_arr) <= 0):
            raise ConfigurationError("atoms must be strictly increasing")
        if atoms_arr[0] < 0.0 or atoms_arr[-1] > 1.0:
            raise ConfigurationError("atoms must lie in [0, 1]")
        if np.any(masses_arr < 0):
            raise ConfigurationError("masses must be non-negative")
        if not np.isclose(masses_arr.sum(), 1.0, atol=1e-9):
            raise ConfigurationError(f"masses must sum to 1, got {masses_arr.sum()}")
        self.atoms = atoms_arr
        self.masses = masses_arr / masses_arr.sum()
        self._cum = np.cumsum(self.masses)
        self._cum[-1] = 1.0

    @classmethod
    def from_breakpoints(cls, breakpoints: Sequence[float], levels: Sequence[float]) -> "AtomicDistribution":
        """Build from CDF levels G(x_k) at the breakpoints x_k (levels must end at 1)"""
        levels_arr = np.asarray(levels, dtype=np.float64)
        if levels_arr.size == 0 or np.any(np.diff(levels_arr) < 0):
            raise ConfigurationError("CDF levels must be non-empty and non-decreasing")
        if not np.isclose(levels_arr[-1], 1.0):
            raise ConfigurationError(f"last CDF level must be 1, got {levels_arr[-1]}")
        masses = np.diff(levels_arr, prepend=0.0)
        return cls(breakpoints, masses)

    def cdf(self, b: Any) -> Any:
        idx = np.searchsorted(self.atoms, b, side="right")
        cum = np.concatenate(([0.0], self._cum))
        return cum[idx]

    def quantile(self, q: Any) -> Any:
        idx = np.searchsorted(self._cum, q, side="left")
        return self.atoms[np.minimum(idx, self.atoms.size - 1)]

    def sample(self, rng: np.random.Generator, size: Optional[int] = None) -> Any:
        u = rng.random(size)
        idx = np.searchsorted(self._cum, u, side="right")
        return self.atoms[np.minimum(idx, self.atoms.size - 1)]

    def integrated_cdf(self, a: float) -> float:
        below = self.atoms <= a
        return float(np.sum(self.masses[below] * (a - self.atoms[below])))

    def to_config(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "breakpoints": self.atoms.tolist(),
            "levels": self._cum.tolist(),
        }


class TwoPointDistribution(AtomicDistribution):
    """Atoms at 1/3 and 2/3; branch 1 puts 1/2 + delta on 1/3, branch 2 puts 1/2 - delta"""

    family = "two_point"

    def __init__(self, delta: float, branch: int = 1) -> None:
        if not 0.0 < delta < 0.25:
            raise ConfigurationError(f"two-point delta must lie in (0, 1/4), got {delta}")
        if branch not in (1, 2):
            raise ConfigurationError(f"two-point branch must be 1 or 2, got {branch}")
        low_mass = 0.5 + delta if branch == 1 else 0.5 - delta
        super().__init__([1.0 / 3.0, 2.0 / 3.0], [low_mass, 1.0 - low_mass])
        self.delta = float(delta)
        self.branch = branch

    def optimal_reward(self) -> float:
        """max_b (1 - b) G(b) for a bidder with value 1"""
        if self.branch == 1:
            return (1.0 + 2.0 * self.delta) / 3.0
        return 1.0 / 3.0

    def to_config(self) -> Dict[str, Any]:
        return {"family": self.family, "delta": self.delta, "branch": self.branch}


class TruncatedNormalDistribution(BidDistribution):
    """Normal(loc, scale) truncated to [0, 1]"""

    family = "truncnorm"

    def __init__(self, loc: float = 0.5, scale: float = 0.2) -> None:
        if scale <= 0:
            raise ConfigurationError(f"scale must be positive, got {scale}")
        self.loc = float(loc)
        self.scale = float(scale)
        a, b = (0.0 - loc) / scale, (1.0 - loc) / scale
        self._dist = stats.truncnorm(a, b, loc=loc, scale=scale)

    def cdf(self, b: Any) -> Any:
        return np.clip(self._dist.cdf(np.clip(b, 0.0, 1.0)), 0.0, 1.0)

    def quantile(self, q: Any) -> Any:
        return np.clip(self._dist.ppf(q), 0.0, 1.0)

    def to_config(self) -> Dict[str, Any]:
        return {"family": self.family, "loc": self.loc, "scale": self.scale}


def random_piecewise(pieces: int, rng: np.random.Generator) -> AtomicDistribution:
    """Seeded piecewise-constant CDF with `pieces` atoms in (0, 1)"""
    if pieces < 1:
        raise ConfigurationError(f"pieces must be >= 1, got {pieces}")
    atoms = np.sort(rng.uniform(0.0, 1.0, size=pieces))
    atoms = np.unique(atoms)
    masses = rng.dirichlet(np.ones(atoms.size))
    return AtomicDistribution(atoms, masses)


def distribution_from_config(config: Dict[str, Any]) -> BidDistribution:
    """Build a distribution from {family: ..., <parameters>}"""
    family = str(config.get("family", "uniform")).lower()
    try:
        if family == "uniform":
            return UniformDistribution()
        if family == "two_point":
            return TwoPointDistribution(float(config["delta"]), int(config.get("branch", 1)))
        if family == "piecewise":
            return AtomicDistribution.from_breakpoints(config["breakpoints"], config["levels"])
        if family == "random_piecewise":
            rng = np.random.default_rng(int(config.get("seed", 0)))
            return random_piecewise(int(config.get("pieces", 8)), rng)
        if family == "truncnorm":
            return TruncatedNormalDistribution(float(config.get("loc", 0.5)), float(config.get("scale", 0.2)))
    except KeyError as e:
        raise ConfigurationError(f"distribution family '{family}' is missing parameter {e}")
    raise ConfigurationError(f"unknown distribution family '{family}'")
