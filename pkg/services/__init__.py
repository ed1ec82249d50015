# Services package initialization
from services.experiment_service import (
    ExperimentConfig,
    RegretTrace,
    ReplicationResult,
    run_episode,
    run_replications,
)
from services.analysis_service import SlopeFit, fit_slope
