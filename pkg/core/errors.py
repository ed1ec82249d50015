from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator"""


class ConfigurationError(SimulationError, ValueError):
    """Invalid experiment, policy or environment configuration"""


class FeedbackShapeError(SimulationError, ValueError):
    """A reveal set does not cover exactly the entries the feedback model promises"""


class EpisodeError(SimulationError, RuntimeError):
    """A replication failed; carries the seed so the run can be reproduced"""

    def __init__(self, message: str, replication: int, seed: int, cause: Optional[BaseException] = None) -> None:
        super().__init__(f"replication {replication} (seed {seed}) failed: {message}")
        self.message = message
        self.replication = replication
        self.seed = seed
        self.cause = cause

    def __reduce__(self):  # type: ignore
        # the cause stays behind when a worker process ships the error back
        return (EpisodeError, (self.message, self.replication, self.seed))


class LevelExhaustedError(SimulationError, AssertionError):
    """The multi-level loop ran through every level without selecting a bid"""
