# Core package initialization
from core.errors import (
    SimulationError,
    ConfigurationError,
    FeedbackShapeError,
    EpisodeError,
    LevelExhaustedError,
)
from core.grids import GridSpec, GridStyle
from core.feedback import CensoredOutcome, RewardQuery
from core.distributions import (
    BidDistribution,
    UniformDistribution,
    AtomicDistribution,
    TwoPointDistribution,
    TruncatedNormalDistribution,
    random_piecewise,
    distribution_from_config,
)
from core.rewards import (
    instantaneous_reward,
    expected_reward,
    expected_rewards,
    oracle_best_bid,
    oracle_best_bid_scan,
    oracle_trajectory_reward,
    oracle_reward_curve,
    quantize_index,
    quantize_value,
    quantization_regret_gap,
)
