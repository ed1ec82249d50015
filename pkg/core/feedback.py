from dataclasses import dataclass
from typing import Optional


def check_price(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")


@dataclass(frozen=True)
class CensoredOutcome:
    """What the bidder sees after one auction: the win flag, and m_t only on a loss"""

    won: bool
    revealed_m: Optional[float] = None

    def __post_init__(self) -> None:
        if self.won and self.revealed_m is not None:
            raise ValueError("a winning bidder never observes the competing bid")
        if not self.won and self.revealed_m is None:
            raise ValueError("a losing bidder always observes the competing bid")

    @classmethod
    def from_auction(cls, bid: float, m: float) -> "CensoredOutcome":
        if bid >= m:
            return cls(won=True)
        return cls(won=False, revealed_m=float(m))


@dataclass(frozen=True)
class RewardQuery:
    value: float
    bid: float

    def __post_init__(self) -> None:
        check_price("value", self.value)
        check_price("bid", self.bid)
