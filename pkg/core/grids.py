from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np


class GridStyle(str, Enum):
    OFFSET = "offset"  # {0, 1/K, ..., (K-1)/K} plus sentinel 1
    UNIT = "unit"      # {1/K, 2/K, ..., 1}


@dataclass(frozen=True)
class GridSpec:
    """Bid (or value) grid of K points on [0, 1]"""

    K: int
    style: GridStyle = GridStyle.UNIT

    def __post_init__(self) -> None:
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"grid size must be a positive integer, got {self.K!r}")
        object.__setattr__(self, "style", GridStyle(self.style))

    @cached_property
    def points(self) -> np.ndarray:
        i = np.arange(1, self.K + 1, dtype=np.float64)
        if self.style is GridStyle.OFFSET:
            return (i - 1.0) / self.K
        return i / self.K

    @cached_property
    def edges(self) -> np.ndarray:
        """Points followed by the sentinel b^{K+1} = 1 (offset grids only)"""
        if self.style is not GridStyle.OFFSET:
            raise ValueError("interval edges are defined for offset grids only")
        return np.append(self.points, 1.0)

    def __len__(self) -> int:
        return self.K

    def refine(self, factor: int) -> "GridSpec":
        """Grid with factor*K points of the same style; always a superset of this one"""
        if factor < 1:
            raise ValueError(f"refinement factor must be >= 1, got {factor}")
        return GridSpec(self.K * factor, self.style)

    def interval_index(self, m: float) -> int:
        """0-based i with b^i < m <= b^{i+1}; -1 when m <= b^1"""
        return int(np.searchsorted(self.edges, m, side="left")) - 1
