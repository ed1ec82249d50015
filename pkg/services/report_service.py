import io
import logging
import os
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import yaml

from core_app.config import Config
from services.experiment_service import ExperimentConfig, RegretTrace, replication_seed, traces_frame

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["rep", "t", "cum_regret"]
SUMMARY_COLUMNS = ["T", "checkpoint", "mean", "std", "n"]


def convert_to_json_serializable(obj: Any) -> Any:  # type: ignore
    """Convert numpy/pandas types to plain Python for JSON and YAML output"""
    if isinstance(obj, dict):
        return {str(k): convert_to_json_serializable(v) for k, v in obj.items()}  # type: ignore
    elif isinstance(obj, (list, tuple)):
        return [convert_to_json_serializable(item) for item in obj]  # type: ignore
    elif isinstance(obj, (bool, np.bool_)):  # type: ignore
        return bool(obj)
    elif isinstance(obj, np.integer):  # type: ignore
        return int(obj)
    elif isinstance(obj, np.floating):  # type: ignore
        return float(obj)
    elif isinstance(obj, np.ndarray):
        return convert_to_json_serializable(obj.tolist())
    elif isinstance(obj, pd.DataFrame):
        return convert_to_json_serializable(obj.to_dict(orient="records"))
    return obj


def traces_csv(traces: List[RegretTrace]) -> pd.DataFrame:
    """rep, t, cum_regret first; diagnostic columns after"""
    frame = traces_frame(traces)
    extra = [c for c in frame.columns if c not in TRACE_COLUMNS]
    return frame[TRACE_COLUMNS + extra]


def generate_csv_report(df: pd.DataFrame, name: str) -> Tuple[bytes, str]:
    """CSV bytes plus a timestamped download name"""
    buffer = io.BytesIO()
    df.to_csv(buffer, index=False)  # type: ignore
    stamp = datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S")
    return buffer.getvalue(), f"{name}_{stamp}.csv"


def run_metadata(config: ExperimentConfig, traces: List[RegretTrace]) -> Dict[str, Any]:
    return convert_to_json_serializable({
        "version": Config.VERSION,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "config": config.to_config(),
        "seeds": {trace.replication: trace.seed for trace in traces}
        or {rep: replication_seed(config.seed, rep) for rep in range(config.reps)},
        "oracle_total": [trace.oracle_total for trace in traces],
        "wall_clock": [trace.wall_clock for trace in traces],
        "episodes": [trace.metadata for trace in traces],
    })


def write_results(out_dir: str, config: ExperimentConfig, traces: List[RegretTrace],
                  summary: pd.DataFrame, prefix: Optional[str] = None) -> Dict[str, str]:
    """Write <prefix>traces.csv, <prefix>summary.csv and <prefix>run.yaml under out_dir.

    With no traces both CSVs hold the header row only.
    """
    os.makedirs(out_dir, exist_ok=True)
    stem = f"{prefix}_" if prefix else ""
    paths = {
        "traces": os.path.join(out_dir, f"{stem}traces.csv"),
        "summary": os.path.join(out_dir, f"{stem}summary.csv"),
        "metadata": os.path.join(out_dir, f"{stem}run.yaml"),
    }
    if os.path.exists(paths["metadata"]):
        logger.warning("overwriting existing results in %s", out_dir)
    traces_csv(traces).to_csv(paths["traces"], index=False)
    summary.reindex(columns=SUMMARY_COLUMNS).to_csv(paths["summary"], index=False)
    with open(paths["metadata"], "w", encoding="utf-8") as f:
        yaml.safe_dump(run_metadata(config, traces), f, sort_keys=False)
    logger.info("wrote %d traces to %s", len(traces), paths["traces"])
    return paths


def write_table(out_dir: str, name: str, frame: pd.DataFrame) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.csv")
    frame.to_csv(path, index=False)
    return path


def write_yaml(out_dir: str, name: str, payload: Dict[str, Any]) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.yaml")
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(convert_to_json_serializable(payload), f, sort_keys=False)
    return path


def read_summary(path: str) -> pd.DataFrame:
    frame = pd.read_csv(path)
    missing = [c for c in SUMMARY_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"{path} is missing summary columns {missing}")
    return frame
