from datetime import datetime, timezone
from typing import Any, Dict

from database.db import db


class ExperimentRun(db.Model):  # type: ignore
    """One run_replications call submitted over HTTP."""
    __tablename__ = "experiment_runs"

    id = db.Column(db.Integer, primary_key=True)
    kind = db.Column(db.String(32), nullable=False, default="auction")
    policy = db.Column(db.String(32), nullable=False)
    env = db.Column(db.String(64), nullable=False)
    values = db.Column(db.String(64), nullable=False)
    horizon = db.Column(db.Integer, nullable=False)
    reps = db.Column(db.Integer, nullable=False)
    seed = db.Column(db.Integer, nullable=False)
    gamma = db.Column(db.Float)
    mean_final_regret = db.Column(db.Float)
    std_final_regret = db.Column(db.Float)
    config_json = db.Column(db.Text)
    created_at = db.Column(db.DateTime, default=lambda: datetime.now(timezone.utc))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind,
            "policy": self.policy,
            "env": self.env,
            "values": self.values,
            "T": self.horizon,
            "reps": self.reps,
            "seed": self.seed,
            "gamma": self.gamma,
            "mean_final_regret": self.mean_final_regret,
            "std_final_regret": self.std_final_regret,
            "created_at": self.created_at.isoformat() if self.created_at else None,
        }
