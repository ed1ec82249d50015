import io
import json
import logging

from flask import Blueprint, current_app, jsonify, request, send_file
from sqlalchemy.exc import SQLAlchemyError

from database.db import db
from database.models import ExperimentRun
from services.config_service import experiment_config
from services.experiment_service import EXPERIMENT_KINDS, ReplicationResult, run_replications
from services.report_service import convert_to_json_serializable, generate_csv_report, traces_csv

logger = logging.getLogger(__name__)

experiments_bp = Blueprint("experiments_bp", __name__)


def _store_run(result: ReplicationResult):
    """Best-effort: a database failure never fails the run"""
    config = result.config
    record = ExperimentRun(
        kind=config.kind,
        policy=config.policy.policy,
        env=str(config.env.get("family", "uniform")),
        values=config.values,
        horizon=config.T,
        reps=config.reps,
        seed=config.seed,
        gamma=config.policy.gamma,
        mean_final_regret=result.final_mean,
        std_final_regret=result.final_std,
        config_json=json.dumps(convert_to_json_serializable(config.to_config())),
    )
    try:
        db.session.add(record)
        db.session.commit()
        return record.id
    except SQLAlchemyError as e:
        db.session.rollback()
        logger.warning("could not store experiment run: %s", str(e))
        return None


def _run_from_request():
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ValueError("request body must be a JSON object of config keys")
    data = dict(data)
    kind = str(data.pop("kind", "auction"))
    if kind not in EXPERIMENT_KINDS:
        raise ValueError(f"kind must be one of {EXPERIMENT_KINDS}, got '{kind}'")
    config = experiment_config(data, kind)
    budget = current_app.config["MAX_HTTP_ROUNDS"]
    if config.T * config.reps > budget:
        raise ValueError(f"T * reps = {config.T * config.reps} exceeds the HTTP limit of {budget} rounds")
    return run_replications(config)


@experiments_bp.route("/run", methods=["POST"])
def run_experiment():
    """Run replications synchronously and return the per-checkpoint summary"""
    try:
        result = _run_from_request()
    except ValueError as e:
        return jsonify({"error": str(e)}), 400
    except Exception as e:
        return jsonify({"error": f"Simulation error: {str(e)}"}), 500

    run_id = _store_run(result)
    return jsonify(convert_to_json_serializable({
        "id": run_id,
        "config": result.config.to_config(),
        "summary": result.summary,
        "final_mean": result.final_mean,
        "final_std": result.final_std,
    }))


@experiments_bp.route("/run.csv", methods=["POST"])
def run_experiment_csv():
    """Same as /run but returns the long-format trace CSV"""
    try:
        result = _run_from_request()
    except ValueError as e:
        return jsonify({"error": str(e)}), 400
    except Exception as e:
        return jsonify({"error": f"Simulation error: {str(e)}"}), 500

    _store_run(result)
    payload, filename = generate_csv_report(traces_csv(result.traces), f"{result.config.policy.policy}_traces")
    return send_file(io.BytesIO(payload), mimetype="text/csv", as_attachment=True, download_name=filename)


@experiments_bp.route("/", methods=["GET"])
def list_experiments():
    runs = ExperimentRun.query.order_by(ExperimentRun.created_at.desc(), ExperimentRun.id.desc()).all()
    return jsonify({"runs": [run.to_dict() for run in runs]})


@experiments_bp.route("/<int:run_id>", methods=["GET"])
def get_experiment(run_id: int):
    run = db.session.get(ExperimentRun, run_id)
    if run is None:
        return jsonify({"error": f"experiment run {run_id} not found"}), 404
    info = run.to_dict()
    info["config"] = json.loads(run.config_json) if run.config_json else None
    return jsonify(info)
