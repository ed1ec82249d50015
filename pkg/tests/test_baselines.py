import numpy as np
import pytest

from core.distributions import TwoPointDistribution, UniformDistribution
from core.errors import ConfigurationError
from core.feedback import CensoredOutcome
from core.grids import GridSpec, GridStyle
from core.rewards import oracle_best_bid
from policies.baselines import ExploreThenCommit, OracleBidder
from policies.factory import PolicySpec, build_policy
from policies.is_ucb import IsUcbBidder
from policies.ml_is_ucb import MlIsUcbBidder
from policies.mse import MseBidder


class TestExploreThenCommit:
    def test_default_exploration_length(self):
        assert ExploreThenCommit(10_000).T_explore == 465

    def test_bids_zero_while_exploring(self):
        bidder = ExploreThenCommit(100, T_explore=20)
        rng = np.random.default_rng(0)
        for t in range(1, 21):
            assert bidder.bid(t, float(rng.random())) == 0.0
            bidder.observe(t, 0.0, CensoredOutcome.from_auction(0.0, float(rng.random())))
        assert len(bidder.empirical_cdf()) == bidder.grid.K

    def test_exact_sample_matches_oracle(self):
        bidder = ExploreThenCommit(1000, T_explore=10, K=10)
        samples = 0.05 + 0.1 * np.arange(10)
        for t, m in enumerate(samples, start=1):
            bidder.observe(t, 0.0, CensoredOutcome.from_auction(0.0, float(m)))
        np.testing.assert_allclose(bidder.empirical_cdf(), bidder.grid.points)
        oracle = OracleBidder(UniformDistribution(), bidder.grid)
        rng = np.random.default_rng(4)
        for t in range(11, 200):
            v = float(rng.random())
            assert bidder.bid(t, v) == pytest.approx(oracle.bid(t, v))

    def test_win_at_zero_records_zero(self):
        bidder = ExploreThenCommit(100, T_explore=2, K=4)
        bidder.observe(1, 0.0, CensoredOutcome(won=True))
        bidder.observe(2, 0.0, CensoredOutcome(won=False, revealed_m=0.6))
        np.testing.assert_allclose(bidder.empirical_cdf(), [0.5, 0.5, 0.5, 1.0])

    def test_mid_exploration_estimate_keeps_updating(self):
        bidder = ExploreThenCommit(100, T_explore=4, K=4)
        bidder.observe(1, 0.0, CensoredOutcome(won=False, revealed_m=0.1))
        np.testing.assert_allclose(bidder.empirical_cdf(), [0.0, 1.0, 1.0, 1.0])
        for t, m in enumerate([0.6, 0.9, 0.9], start=2):
            bidder.observe(t, 0.0, CensoredOutcome(won=False, revealed_m=m))
        np.testing.assert_allclose(bidder.empirical_cdf(), [0.0, 0.25, 0.5, 0.5])
        assert bidder.bid(5, 1.0) == 0.5

    def test_later_observations_are_ignored(self):
        bidder = ExploreThenCommit(100, T_explore=1, K=4)
        bidder.observe(1, 0.0, CensoredOutcome(won=False, revealed_m=0.3))
        bidder.observe(2, 0.5, CensoredOutcome(won=False, revealed_m=0.9))
        assert bidder.describe()["T_explore"] == 1
        np.testing.assert_allclose(bidder.empirical_cdf(), [0.0, 0.0, 1.0, 1.0])


class TestOracleBidder:
    def test_matches_oracle_best_bid(self):
        grid = GridSpec(30, GridStyle.OFFSET)
        G = TwoPointDistribution(0.1, 1)
        bidder = OracleBidder(G, grid)
        for v in np.linspace(0.0, 1.0, 23):
            assert bidder.bid(1, float(v)) == oracle_best_bid(float(v), G, grid)[0]

    def test_observe_is_a_no_op(self):
        bidder = OracleBidder(UniformDistribution(), GridSpec(10))
        before = bidder.bid(1, 0.7)
        bidder.observe(1, before, CensoredOutcome(won=True))
        assert bidder.bid(2, 0.7) == before


class TestFactory:
    @pytest.mark.parametrize("name, cls", [
        ("mse", MseBidder),
        ("is_ucb", IsUcbBidder),
        ("ml_is_ucb", MlIsUcbBidder),
        ("etc", ExploreThenCommit),
        ("oracle", OracleBidder),
    ])
    def test_builds_each_policy(self, name, cls):
        policy = build_policy(PolicySpec(name), 1024, UniformDistribution())
        assert isinstance(policy, cls)
        assert policy.describe()["policy"] == name

    def test_unknown_policy(self):
        with pytest.raises(ConfigurationError):
            PolicySpec("thompson")

    def test_non_positive_gamma(self):
        with pytest.raises(ConfigurationError):
            PolicySpec("mse", gamma=0.0)

    def test_validate_horizon(self):
        with pytest.raises(ConfigurationError):
            PolicySpec("mse").validate_horizon(1)
        with pytest.raises(ConfigurationError):
            PolicySpec("ml_is_ucb").validate_horizon(16)
        PolicySpec("ml_is_ucb").validate_horizon(1024)

    def test_to_config_drops_unset_fields(self):
        assert PolicySpec("etc", T_explore=50).to_config() == {"policy": "etc", "gamma": 3.0, "T_explore": 50}

    def test_oracle_uses_requested_grid_size(self):
        policy = build_policy(PolicySpec("oracle", K=8), 100, UniformDistribution())
        assert policy.grid == GridSpec(8, GridStyle.OFFSET)
