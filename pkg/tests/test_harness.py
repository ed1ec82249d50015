import pickle

import numpy as np
import pytest

from core.distributions import UniformDistribution
from core.errors import ConfigurationError, EpisodeError
from core.grids import GridSpec, GridStyle
from core.rewards import oracle_trajectory_reward
from environments.two_point import two_point_env
from policies.base import AuctionPolicy
from policies.factory import PolicySpec
from services import experiment_service
from services.experiment_service import (
    ExperimentConfig,
    default_checkpoints,
    episode_streams,
    replication_seed,
    run_episode,
    run_replications,
    summarize,
    traces_frame,
)


class FixedBidder(AuctionPolicy):
    name = "fixed"

    def __init__(self, bid: float, grid: GridSpec) -> None:
        self._bid = bid
        self.grid = grid

    def bid(self, t, value):
        return self._bid

    def observe(self, t, bid, outcome):
        return None


def patch_policy(monkeypatch, bid, grid):
    monkeypatch.setattr(experiment_service, "build_policy", lambda spec, T, G: FixedBidder(bid, grid))


class TestSeeds:
    def test_replication_seed_is_stable(self):
        assert replication_seed(7, 3) == replication_seed(7, 3)
        assert replication_seed(7, 3) != replication_seed(7, 4)
        assert replication_seed(7, 3) != replication_seed(8, 3)
        assert 0 <= replication_seed(0, 0) < 2 ** 63

    def test_default_checkpoints(self):
        assert default_checkpoints(16) == [1, 2, 4, 8, 16]
        assert default_checkpoints(20) == [1, 2, 4, 8, 16, 20]


class TestConfig:
    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(PolicySpec("mse"), 100, kind="bogus")

    def test_non_auction_kinds_run_mse(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(PolicySpec("is_ucb"), 100, kind="lowerbound")

    def test_checkpoints_must_be_sorted(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(PolicySpec("mse"), 100, checkpoints=[5, 3])
        with pytest.raises(ConfigurationError):
            ExperimentConfig(PolicySpec("mse"), 100, checkpoints=[50, 200])

    def test_horizon_checked_against_policy(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(PolicySpec("ml_is_ucb"), 16)

    def test_lower_bound_shape(self):
        assert ExperimentConfig(PolicySpec("mse"), 1000, kind="lowerbound").lower_bound_shape() == (10, 20)
        assert ExperimentConfig(PolicySpec("mse"), 1000, kind="lowerbound", M=4).lower_bound_shape() == (4, 8)
        fixed = ExperimentConfig(PolicySpec("mse"), 1000, kind="lowerbound", fixed_eps=[1, -1, 1])
        assert fixed.lower_bound_shape() == (3, 6)

    def test_to_config(self):
        config = ExperimentConfig(PolicySpec("mse", gamma=0.5), 100, reps=2).to_config()
        assert config["policy"] == {"policy": "mse", "gamma": 0.5}
        assert config["T"] == 100 and config["reps"] == 2
        assert "out" not in config


class TestAuctionEpisodes:
    def test_oracle_has_zero_regret(self):
        config = ExperimentConfig(PolicySpec("oracle"), 1000, reps=3, seed=1)
        result = run_replications(config)
        for trace in result.traces:
            np.testing.assert_allclose(trace.cum_regret, 0.0, atol=1e-9)
        assert result.final_mean == pytest.approx(0.0, abs=1e-9)
        assert result.final_std == pytest.approx(0.0, abs=1e-9)

    def test_fixed_suboptimal_bid_on_two_point(self, monkeypatch):
        patch_policy(monkeypatch, 2.0 / 3.0, GridSpec(3))
        config = ExperimentConfig(
            PolicySpec("oracle"), 10,
            env={"family": "two_point", "delta": 0.1, "branch": 1},
            values="constant", value_params={"value": 1.0},
        )
        trace = run_episode(config, 0)
        # (1 - 1/3) 0.6 - (1 - 2/3) 1 = 2 delta / 3 every round
        assert trace.final_regret == pytest.approx(10 * 0.2 / 3)
        np.testing.assert_allclose(np.diff(trace.cum_regret) / np.diff(trace.checkpoints), 0.2 / 3)

    @pytest.mark.parametrize("branch", [1, 2])
    def test_two_point_oracle_is_exact(self, branch):
        T = 1024
        pair = two_point_env(T)
        config = ExperimentConfig(
            PolicySpec("ml_is_ucb"), T,
            env={"family": "two_point", "delta": pair.delta, "branch": branch},
            values="constant", value_params={"value": 1.0},
        )
        assert config.oracle_refine == 3
        trace = run_episode(config, 0)
        expected = (1 + 2 * pair.delta) / 3 if branch == 1 else 1 / 3
        assert trace.oracle_total / T == pytest.approx(expected, rel=1e-12)

    def test_two_point_refine_keeps_multiples_of_three(self):
        config = ExperimentConfig(PolicySpec("mse"), 64, env={"family": "two_point", "delta": 0.1}, oracle_refine=6)
        assert config.oracle_refine == 6
        assert ExperimentConfig(PolicySpec("mse"), 64, oracle_refine=2).oracle_refine == 2

    def test_out_of_range_bid_fails_with_seed(self, monkeypatch):
        patch_policy(monkeypatch, 1.5, GridSpec(3))
        config = ExperimentConfig(PolicySpec("oracle"), 10, seed=4)
        with pytest.raises(EpisodeError) as info:
            run_episode(config, 2)
        assert info.value.replication == 2
        assert info.value.seed == replication_seed(4, 2)

    def test_deterministic_for_fixed_seed(self):
        config = ExperimentConfig(PolicySpec("mse", M=10, K=10), 1000, reps=2, seed=7)
        first, second = run_replications(config), run_replications(config)
        for a, b in zip(first.traces, second.traces):
            np.testing.assert_array_equal(a.cum_regret, b.cum_regret)
            np.testing.assert_array_equal(a.cum_realized, b.cum_realized)

    def test_workers_do_not_change_results(self):
        serial = run_replications(ExperimentConfig(PolicySpec("mse", M=10, K=10), 1000, reps=3, seed=7))
        pooled = run_replications(ExperimentConfig(PolicySpec("mse", M=10, K=10), 1000, reps=3, seed=7, workers=2))
        assert [t.replication for t in pooled.traces] == [0, 1, 2]
        for a, b in zip(serial.traces, pooled.traces):
            np.testing.assert_array_equal(a.cum_regret, b.cum_regret)
        assert serial.summary.equals(pooled.summary)

    def test_oracle_total_matches_trajectory_reward(self):
        config = ExperimentConfig(PolicySpec("is_ucb"), 500, seed=3)
        trace = run_episode(config, 0)
        values = UniformDistribution().sample(episode_streams(trace.seed)["schedule"], 500)
        grid = GridSpec(trace.metadata["policy"]["K"], GridStyle(trace.metadata["policy"]["grid"]))
        assert trace.oracle_total == pytest.approx(oracle_trajectory_reward(values, UniformDistribution(), grid))

    @pytest.mark.parametrize("policy", ["mse", "is_ucb", "ml_is_ucb", "etc"])
    def test_traces_are_monotone(self, policy):
        trace = run_episode(ExperimentConfig(PolicySpec(policy, gamma=0.1), 400, seed=2), 0)
        assert trace.is_monotone()
        assert trace.final_regret >= 0.0
        assert trace.checkpoints[-1] == 400

    def test_refined_oracle_never_lowers_regret(self):
        base = run_episode(ExperimentConfig(PolicySpec("mse"), 400, seed=5), 0)
        refined = run_episode(ExperimentConfig(PolicySpec("mse"), 400, seed=5, oracle_refine=4), 0)
        assert refined.final_regret >= base.final_regret - 1e-9


class TestOtherKinds:
    def test_lower_bound_episode(self):
        config = ExperimentConfig(PolicySpec("mse", gamma=0.5), 512, kind="lowerbound", M=4, seed=1)
        trace = run_episode(config, 0)
        assert trace.is_monotone()
        assert trace.final_regret > 0.0
        assert trace.metadata["instance"]["K"] == 8
        assert 1 <= trace.metadata["surviving"] <= 4 * 8
        assert isinstance(trace.metadata["best_retained"], bool)
        assert trace.final_regret <= 512 * 0.5

    def test_fixed_signs(self):
        config = ExperimentConfig(PolicySpec("mse"), 100, kind="lowerbound", fixed_eps=[1, -1])
        trace = run_episode(config, 0)
        assert trace.metadata["instance"]["eps"] == [1, -1]

    def test_inventory_episode(self):
        config = ExperimentConfig(PolicySpec("mse", gamma=0.1), 1024, kind="inventory", seed=2)
        trace = run_episode(config, 0)
        assert trace.is_monotone()
        assert trace.metadata["newsvendor_quantile"] == pytest.approx(0.5)
        assert trace.extra["cum_cost"].shape == (len(trace.checkpoints),)
        assert np.all(np.diff(trace.extra["cum_cost"]) >= 0)


class TestReduction:
    def test_frame_and_summary(self):
        result = run_replications(ExperimentConfig(PolicySpec("mse"), 64, reps=3, checkpoints=[16, 64]))
        frame = traces_frame(result.traces)
        assert list(frame.columns) == ["rep", "t", "cum_regret", "cum_realized"]
        assert len(frame) == 6
        summary = summarize(frame, 64)
        assert summary["checkpoint"].tolist() == [16, 64]
        assert summary["n"].tolist() == [3, 3]
        finals = [t.final_regret for t in result.traces]
        assert summary["mean"].iloc[-1] == pytest.approx(np.mean(finals))
        assert summary["std"].iloc[-1] == pytest.approx(np.std(finals, ddof=1))

    def test_single_replication_std_is_zero(self):
        result = run_replications(ExperimentConfig(PolicySpec("mse"), 64))
        assert result.final_std == 0.0

    def test_empty_frame(self):
        assert list(summarize(traces_frame([]), 10).columns) == ["T", "checkpoint", "mean", "std", "n"]


class TestEpisodeError:
    def test_pickles_across_processes(self):
        error = pickle.loads(pickle.dumps(EpisodeError("bad bid", 3, 42)))
        assert (error.replication, error.seed) == (3, 42)
        assert "seed 42" in str(error)
