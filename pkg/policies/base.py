from abc import ABC, abstractmethod
from typing import Any, Dict

from core.feedback import CensoredOutcome
from core.grids import GridSpec


class AuctionPolicy(ABC):
    """Round-based bidder: bid(t, v_t) then observe(t, b_t, outcome), t = 1..T"""

    name: str = "abstract"
    grid: GridSpec

    @abstractmethod
    def bid(self, t: int, value: float) -> float:
        """Bid for round t; must be a point of self.grid"""

    @abstractmethod
    def observe(self, t: int, bid: float, outcome: CensoredOutcome) -> None:
        """Censored feedback for the bid placed in round t"""

    def describe(self) -> Dict[str, Any]:
        return {"policy": self.name, "K": self.grid.K, "grid": self.grid.style.value}
