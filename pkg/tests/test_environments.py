import logging

import numpy as np
import pytest

from core.distributions import TwoPointDistribution, UniformDistribution
from core.errors import ConfigurationError
from environments.auction_env import AuctionEnv
from environments.lower_bound import LowerBoundInstance, lower_bound_reveal
from environments.schedules import (
    ValueSchedule,
    block_contexts,
    make_block_schedule,
    read_value_file,
    schedule_from_config,
)
from environments.two_point import two_point_env
from services.experiment_service import episode_streams


class TestBlockContexts:
    def test_even_blocks(self):
        np.testing.assert_array_equal(block_contexts(4, 12), [4, 4, 4, 3, 3, 3, 2, 2, 2, 1, 1, 1])

    def test_remainder_goes_to_last_block(self, caplog):
        with caplog.at_level(logging.WARNING, logger="environments.schedules"):
            contexts = block_contexts(4, 10)
        np.testing.assert_array_equal(contexts, [4, 4, 3, 3, 2, 2, 1, 1, 1, 1])
        assert "does not divide" in caplog.text

    def test_non_increasing(self):
        assert np.all(np.diff(block_contexts(7, 1000)) <= 0)

    def test_rejects_more_blocks_than_rounds(self):
        with pytest.raises(ConfigurationError):
            block_contexts(10, 5)


class TestLowerBoundInstance:
    def test_mean_matrix(self):
        instance = LowerBoundInstance.fixed([1, -1], K=4)
        np.testing.assert_allclose(instance.means[0], [0.625, 0.6875, 0.5625, 0.4375])
        np.testing.assert_allclose(instance.means[1], [0.4375, 0.5625, 0.75, 0.6875])
        np.testing.assert_array_equal(instance.best_actions(), [2, 3])
        np.testing.assert_allclose(instance.optimal_means(), [0.6875, 0.75])

    def test_lipschitz(self):
        rng = np.random.default_rng(0)
        for M in (1, 2, 5, 12):
            instance = LowerBoundInstance.mixture(M, rng)
            assert instance.K == 2 * M
            assert instance.lipschitz_in_actions()
            assert instance.lipschitz_in_contexts()

    def test_rejects_small_K(self):
        with pytest.raises(ConfigurationError):
            LowerBoundInstance.fixed([1, 1, -1], K=4)

    def test_rejects_bad_signs(self):
        with pytest.raises(ConfigurationError):
            LowerBoundInstance.fixed([1, 0])

    def test_reveal_shape_and_means(self):
        instance = LowerBoundInstance.fixed([1, -1, 1])
        rng = np.random.default_rng(1)
        draws = np.stack([lower_bound_reveal(instance, 2, 3, rng) for _ in range(20_000)])
        assert draws.shape == (20_000, 3, 4)
        assert set(np.unique(draws)) <= {0.0, 1.0}
        np.testing.assert_allclose(draws.mean(axis=0), instance.means[:, 2:], atol=0.015)

    def test_reveal_rejects_bad_action(self):
        instance = LowerBoundInstance.fixed([1])
        with pytest.raises(ValueError):
            lower_bound_reveal(instance, 1, 3, np.random.default_rng(0))

    def test_to_config(self):
        assert LowerBoundInstance.fixed([1, -1]).to_config() == {"M": 2, "K": 4, "eps": [1, -1]}


class TestTwoPoint:
    def test_delta(self):
        pair = two_point_env(10_000)
        assert pair.delta == pytest.approx(0.0025)
        assert pair.g1.cdf(1.0 / 3.0) == pytest.approx(0.5025)
        assert pair.g2.cdf(1.0 / 3.0) == pytest.approx(0.4975)
        assert pair.regret_floor() == pytest.approx(100 / (24 * np.e ** 2))

    def test_sampling_frequencies(self):
        rng = np.random.default_rng(2)
        draws = TwoPointDistribution(0.2, 1).sample(rng, 200_000)
        assert set(np.unique(draws)) == {1.0 / 3.0, 2.0 / 3.0}
        assert np.mean(draws == 1.0 / 3.0) == pytest.approx(0.7, abs=0.005)

    def test_schedule_is_constant_one(self):
        values = two_point_env(100).schedule.draw(5, np.random.default_rng(0))
        np.testing.assert_array_equal(values, np.ones(5))

    def test_short_horizon(self):
        with pytest.raises(ConfigurationError):
            two_point_env(3)


class TestAuctionEnv:
    def test_tie_is_a_win(self):
        G = TwoPointDistribution(0.1, 1)
        env = AuctionEnv(G, ValueSchedule(kind="constant", value=1.0), np.random.default_rng(0))
        env.reset(100)
        for t in range(1, 101):
            outcome, m = env.step(t, 2.0 / 3.0)
            assert outcome.won and m in (1.0 / 3.0, 2.0 / 3.0)

    def test_loss_reveals_m(self):
        env = AuctionEnv(UniformDistribution(), ValueSchedule(kind="decreasing"), np.random.default_rng(0))
        env.reset(50)
        for t in range(1, 51):
            outcome, m = env.step(t, 0.0)
            assert not outcome.won and outcome.revealed_m == m

    def test_step_before_reset(self):
        env = AuctionEnv(UniformDistribution(), ValueSchedule(kind="decreasing"), np.random.default_rng(0))
        with pytest.raises(RuntimeError):
            env.step(1, 0.5)

    def test_streams_are_separate(self):
        # the auction stream does not depend on how much the schedule consumed
        a, b = episode_streams(9), episode_streams(9)
        a["schedule"].random(10)
        b["schedule"].random(5000)
        np.testing.assert_array_equal(a["auction"].random(20), b["auction"].random(20))


class TestSchedules:
    def test_constant(self):
        schedule = schedule_from_config("constant", {"value": 0.3})
        np.testing.assert_array_equal(schedule.draw(4, np.random.default_rng(0)), [0.3] * 4)

    def test_decreasing(self):
        np.testing.assert_allclose(schedule_from_config("decreasing").draw(4, np.random.default_rng(0)),
                                   [1.0, 0.75, 0.5, 0.25])

    def test_decreasing_blocks(self):
        schedule = make_block_schedule(4, 12)
        np.testing.assert_allclose(schedule.draw(12, np.random.default_rng(0)), block_contexts(4, 12) / 4)
        np.testing.assert_array_equal(schedule.contexts(12), block_contexts(4, 12))

    def test_iid_family(self):
        schedule = schedule_from_config("iid_truncnorm", {"value_distribution": {"loc": 0.3, "scale": 0.1}})
        values = schedule.draw(20_000, np.random.default_rng(0))
        assert values.mean() == pytest.approx(0.3, abs=0.01)

    def test_explicit_too_short(self):
        schedule = schedule_from_config("explicit", {"values": [0.1, 0.2]})
        with pytest.raises(ConfigurationError):
            schedule.draw(3, np.random.default_rng(0))

    def test_value_file(self, tmp_path):
        path = tmp_path / "values.txt"
        path.write_text("0.9\n0.5\n0.25\n")
        np.testing.assert_allclose(read_value_file(str(path)), [0.9, 0.5, 0.25])
        schedule = schedule_from_config("file", {"value_file": str(path)})
        np.testing.assert_allclose(schedule.draw(2, np.random.default_rng(0)), [0.9, 0.5])

    def test_value_file_out_of_range(self, tmp_path):
        path = tmp_path / "values.txt"
        path.write_text("0.9\n1.5\n")
        with pytest.raises(ConfigurationError):
            schedule_from_config("file", {"value_file": str(path)}).draw(2, np.random.default_rng(0))

    def test_unknown_schedule(self):
        with pytest.raises(ConfigurationError):
            schedule_from_config("sawtooth")
        with pytest.raises(ConfigurationError):
            ValueSchedule(kind="constant", value=2.0)
