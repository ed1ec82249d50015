# Policies package initialization
from policies.base import AuctionPolicy
from policies.elimination import MonotoneSuccessiveElimination, MseState
from policies.mse import MseBidder, auction_reveal
from policies.is_ucb import IsUcbBidder, IsUcbState, is_ucb_round, is_ucb_observe
from policies.ml_is_ucb import (
    MlIsUcbBidder,
    MlIsUcbState,
    LevelHistory,
    ml_is_ucb_init,
    ml_is_ucb_round,
    ml_is_ucb_observe,
    level_widths,
    certificate_widths,
)
from policies.baselines import ExploreThenCommit, OracleBidder
from policies.factory import PolicySpec, build_policy, POLICY_NAMES
