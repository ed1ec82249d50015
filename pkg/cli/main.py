"""Command-line front end: run, sweep, lowerbound, twopoint, inventory, demo."""
import argparse
import logging
import math
import sys
from typing import Any, Callable, Dict, List, Optional

import pandas as pd

from core.errors import ConfigurationError, SimulationError
from core_app.config import Config
from core_app.logging_config import configure_logging
from environments.two_point import two_point_env
from services.analysis_service import (
    SlopeFit,
    bound_ratios,
    fit_slope,
    lower_bound_ratios,
    ratios_flat,
    two_point_floor,
)
from services.config_service import experiment_config, horizon_list, load_config_file, merge_config
from services.experiment_service import ExperimentConfig, ReplicationResult, run_replications
from services.report_service import write_results, write_table, write_yaml

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("run", "sweep", "lowerbound", "twopoint", "inventory", "demo")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat YAML config; flags override its values")
    parser.add_argument("--policy", help="mse, is_ucb, ml_is_ucb, etc or oracle")
    parser.add_argument("--env", help="others' highest bid distribution: uniform, two_point, piecewise, "
                                      "random_piecewise or truncnorm")
    parser.add_argument("--values", help="value schedule: iid_uniform, iid_<family>, constant, decreasing, "
                                         "decreasing_blocks or file")
    parser.add_argument("--T", type=int, help="horizon")
    parser.add_argument("--T-list", dest="T_list", help="comma separated horizons for sweeps")
    parser.add_argument("--reps", type=int, help="replications per horizon")
    parser.add_argument("--seed", type=int, help="base seed")
    parser.add_argument("--gamma", type=float, help=f"confidence multiplier (default {Config.GAMMA})")
    parser.add_argument("--M", type=int, help="number of value contexts")
    parser.add_argument("--K", type=int, help="number of bid grid points")
    parser.add_argument("--L", type=int, help="ML-IS-UCB levels")
    parser.add_argument("--T-explore", dest="T_explore", type=int, help="ETC exploration rounds")
    parser.add_argument("--delta", type=float, help="two-point separation")
    parser.add_argument("--value", type=float, help="value for the constant schedule")
    parser.add_argument("--value-file", dest="value_file", help="text file with one value per line")
    parser.add_argument("--oracle-refine", dest="oracle_refine", type=int,
                        help="integer refinement of the policy grid scanned by the regret oracle")
    parser.add_argument("--out", help=f"output directory (default {Config.OUTPUT_DIR})")
    parser.add_argument("--workers", type=int, help="worker processes for replications")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Bidding in repeated first-price auctions with censored feedback",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    run = sub.add_parser("run", help="one (policy, environment, T) experiment")
    _add_common(run)
    sweep = sub.add_parser("sweep", help="replications over a list of horizons plus a log-log slope report")
    _add_common(sweep)
    lower = sub.add_parser("lowerbound", help="generic MSE on the adversarial-context hard instance")
    _add_common(lower)
    lower.add_argument("--fixed-eps", dest="fixed_eps", help="comma separated +1/-1 signs instead of a random mix")
    twopoint = sub.add_parser("twopoint", help="regret averaged over the indistinguishable G1/G2 pair")
    _add_common(twopoint)
    inventory = sub.add_parser("inventory", help="censored-demand newsvendor with inventory MSE")
    _add_common(inventory)
    inventory.add_argument("--demand", help="demand distribution family (default uniform)")
    inventory.add_argument("--p", type=float, help="unit price (default 1)")
    inventory.add_argument("--h", type=float, help="unit overage cost (default 1)")
    demo = sub.add_parser("demo", help="small end-to-end run printing a regret table")
    _add_common(demo)
    return parser


def _collect(args: argparse.Namespace) -> Dict[str, Any]:
    file_values = load_config_file(args.config) if args.config else {}
    skip = {"command", "config", "verbose", "quiet"}
    overrides = {k: v for k, v in vars(args).items() if k not in skip}
    if isinstance(overrides.get("fixed_eps"), str):
        overrides["fixed_eps"] = [int(e) for e in overrides["fixed_eps"].split(",") if e.strip()]
    return merge_config(file_values, overrides)


def _horizons(values: Dict[str, Any]) -> List[int]:
    if values.get("T_list"):
        return horizon_list(values)
    if values.get("T") is None:
        raise ConfigurationError("no horizon given; set T or T_list")
    return [int(values["T"])]


def _out_dir(values: Dict[str, Any]) -> str:
    return str(values.get("out") or Config.OUTPUT_DIR)


def _run_and_write(config: ExperimentConfig, out_dir: str, prefix: Optional[str] = None) -> ReplicationResult:
    result = run_replications(config)
    write_results(out_dir, config, result.traces, result.summary, prefix)
    return result


def _final_row(T: int, result: ReplicationResult) -> Dict[str, Any]:
    return {"T": T, "mean": result.final_mean, "std": result.final_std, "n": len(result.traces)}


def _slope_report(out_dir: str, frame: pd.DataFrame, name: str) -> Optional[SlopeFit]:
    """Fit and write the slope when the sweep has enough horizons"""
    if len(frame) < 4:
        return None
    fit = fit_slope(frame["T"].tolist(), frame["mean"].tolist())
    write_yaml(out_dir, name, fit.to_dict())
    print(f"log-log slope {fit.slope:.3f} +/- {fit.stderr:.3f}")
    return fit


def cmd_run(values: Dict[str, Any]) -> int:
    config = experiment_config(values, "auction")
    result = _run_and_write(config, _out_dir(values))
    print(result.summary.to_string(index=False))
    return 0


def cmd_sweep(values: Dict[str, Any]) -> int:
    horizons = horizon_list(values)
    if len(horizons) < 4:
        raise ConfigurationError(f"sweep needs at least 4 horizons, got {len(horizons)}")
    configs = [experiment_config(values, "auction", T) for T in horizons]
    out_dir = _out_dir(values)
    rows = []
    for config in configs:
        result = _run_and_write(config, out_dir, f"T{config.T}")
        rows.append(_final_row(config.T, result))
        logger.info("T=%d mean final regret %.3f (std %.3f)", config.T, result.final_mean, result.final_std)
    frame = bound_ratios(pd.DataFrame(rows), configs[0].policy.policy, configs[0].policy.gamma)
    write_table(out_dir, "sweep", frame)
    print(frame.to_string(index=False))
    _slope_report(out_dir, frame, "slope")
    return 0


def cmd_lowerbound(values: Dict[str, Any]) -> int:
    values = {**values, "policy": "mse"}
    out_dir = _out_dir(values)
    rows = []
    for T in _horizons(values):
        config = experiment_config(values, "lowerbound", T)
        result = _run_and_write(config, out_dir, f"T{T}")
        M, K = config.lower_bound_shape()
        surviving = [trace.metadata["surviving"] for trace in result.traces]
        rows.append({**_final_row(T, result), "M": M, "K": K, "surviving_mean": sum(surviving) / len(surviving)})
    frame = lower_bound_ratios(pd.DataFrame(rows))
    if len(frame) > 1 and not ratios_flat(frame["ratio"]):
        logger.warning("mean / T^(2/3) moves by more than a factor 2 across horizons: %s",
                       [round(r, 3) for r in frame["ratio"]])
    write_table(out_dir, "lowerbound", frame)
    print(frame.to_string(index=False))
    _slope_report(out_dir, frame, "slope")
    return 0


def cmd_twopoint(values: Dict[str, Any]) -> int:
    out_dir = _out_dir(values)
    rows = []
    for T in _horizons(values):
        pair = two_point_env(T)
        delta = float(values.get("delta") or pair.delta)
        finals = []
        for branch in (1, 2):
            branch_values = {**values, "env": "two_point", "delta": delta, "branch": branch,
                             "values": "constant", "value": 1.0,
                             "policy": values.get("policy") or "ml_is_ucb"}
            config = experiment_config(branch_values, "auction", T)
            finals.append(_run_and_write(config, out_dir, f"T{T}_g{branch}"))
        rows.append({
            "T": T,
            "delta": delta,
            "mean": (finals[0].final_mean + finals[1].final_mean) / 2.0,
            "mean_g1": finals[0].final_mean,
            "mean_g2": finals[1].final_mean,
            "floor": two_point_floor(T),
            "optimal_g1": pair.g1.optimal_reward(),
            "optimal_g2": pair.g2.optimal_reward(),
            "oracle_g1": finals[0].traces[0].oracle_total / T,
            "oracle_g2": finals[1].traces[0].oracle_total / T,
        })
    frame = pd.DataFrame(rows)
    write_table(out_dir, "twopoint", frame)
    write_yaml(out_dir, "twopoint", {"horizons": rows})
    print(frame.to_string(index=False))
    return 0


def cmd_inventory(values: Dict[str, Any]) -> int:
    values = {**values, "policy": "mse"}
    out_dir = _out_dir(values)
    rows = []
    for T in _horizons(values):
        config = experiment_config(values, "inventory", T)
        result = _run_and_write(config, out_dir, f"T{T}")
        best = [trace.metadata["best_level"] for trace in result.traces]
        target = result.traces[0].metadata["newsvendor_quantile"]
        tolerance = 2.0 / math.sqrt(T)
        rows.append({
            **_final_row(T, result),
            "quantile": target,
            "best_level_mean": sum(best) / len(best),
            "within_tolerance": sum(abs(b - target) <= tolerance for b in best) / len(best),
            "cost_mean": float(sum(trace.extra["cum_cost"][-1] for trace in result.traces) / len(best)),
        })
    frame = pd.DataFrame(rows)
    write_table(out_dir, "inventory", frame)
    print(frame.to_string(index=False))
    _slope_report(out_dir, frame, "slope")
    return 0


def cmd_demo(values: Dict[str, Any]) -> int:
    T = int(values.get("T") or 1024)
    rows = []
    for policy in ("oracle", "mse", "is_ucb", "ml_is_ucb", "etc"):
        config = experiment_config({"reps": 3, "seed": 0, **values, "policy": policy}, "auction", T)
        result = run_replications(config)
        if values.get("out"):
            write_results(str(values["out"]), config, result.traces, result.summary, policy)
        rows.append({"policy": policy, "T": T, "mean_regret": result.final_mean, "std": result.final_std})
    print(pd.DataFrame(rows).to_string(index=False))
    return 0


COMMANDS: Dict[str, Callable[[Dict[str, Any]], int]] = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "lowerbound": cmd_lowerbound,
    "twopoint": cmd_twopoint,
    "inventory": cmd_inventory,
    "demo": cmd_demo,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else "WARNING" if args.quiet else None)
    try:
        return COMMANDS[args.command](_collect(args))
    except (SimulationError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
