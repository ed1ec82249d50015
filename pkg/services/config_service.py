"""Flat experiment config files: loading, validation and mapping onto ExperimentConfig."""
import logging
import os
from typing import Any, Dict, List, Optional

import yaml

from core.errors import ConfigurationError
from core_app.config import Config
from policies.factory import PolicySpec
from services.experiment_service import ExperimentConfig

logger = logging.getLogger(__name__)

CONFIG_KEYS = (
    "policy", "env", "values", "T", "T_list", "reps", "seed", "gamma", "M", "K", "out", "workers",
    "delta", "branch", "p", "h", "demand", "checkpoints", "T_explore", "L", "breakpoints", "levels",
    "loc", "scale", "value", "value_file", "fixed_eps", "pieces", "oracle_refine",
)
DISTRIBUTION_KEYS = ("delta", "branch", "breakpoints", "levels", "loc", "scale", "pieces")


def check_keys(mapping: Dict[str, Any], source: str) -> None:
    unknown = sorted(set(mapping) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigurationError(f"unknown config key '{unknown[0]}' in {source}")


def load_config_file(path: str) -> Dict[str, Any]:
    """Parse a flat YAML mapping; keys are flag names with dashes as underscores"""
    if not os.path.exists(path):
        raise ConfigurationError(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            loaded = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"could not parse config file {path}: {str(e)}")
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ConfigurationError(f"config file {path} must hold a key-value mapping")
    loaded = {str(k).replace("-", "_"): v for k, v in loaded.items()}
    check_keys(loaded, path)
    logger.debug("loaded %d config keys from %s", len(loaded), path)
    return loaded


def merge_config(file_values: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Flag values win; flags left at None fall back to the file"""
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    check_keys(merged, "flags")
    return merged


def distribution_spec(family: str, values: Dict[str, Any]) -> Dict[str, Any]:
    spec: Dict[str, Any] = {"family": family}
    spec.update({k: values[k] for k in DISTRIBUTION_KEYS if values.get(k) is not None})
    return spec


def _int_or_none(x: Any) -> Optional[int]:
    return None if x is None else int(x)


def policy_spec(values: Dict[str, Any], default: str = "mse") -> PolicySpec:
    return PolicySpec(
        policy=str(values.get("policy") or default),
        gamma=float(values["gamma"]) if values.get("gamma") is not None else Config.GAMMA,
        M=_int_or_none(values.get("M")),
        K=_int_or_none(values.get("K")),
        L=_int_or_none(values.get("L")),
        T_explore=_int_or_none(values.get("T_explore")),
    )


def experiment_config(values: Dict[str, Any], kind: str = "auction", T: Optional[int] = None) -> ExperimentConfig:
    """ExperimentConfig for one horizon from a merged flat mapping"""
    check_keys(values, "config")
    T = T if T is not None else values.get("T")
    if T is None:
        raise ConfigurationError("no horizon given; set T")
    try:
        schedule = values.get("values") or "iid_uniform"
        value_params: Dict[str, Any] = {}
        if isinstance(schedule, list):
            value_params["values"] = [float(v) for v in schedule]
            schedule = "explicit"
        if values.get("value") is not None:
            value_params["value"] = float(values["value"])
        if values.get("value_file") is not None:
            value_params["value_file"] = str(values["value_file"])
        family = values.get("demand") if kind == "inventory" else values.get("env")
        checkpoints = values.get("checkpoints")
        return ExperimentConfig(
            policy=policy_spec(values),
            T=int(T),
            kind=kind,
            env=distribution_spec(str(family or "uniform"), values),
            values=str(schedule),
            value_params=value_params,
            reps=int(values.get("reps", 1)),
            seed=int(values.get("seed", 0)),
            checkpoints=[int(c) for c in checkpoints] if checkpoints else None,
            workers=int(values.get("workers") or Config.WORKERS),
            oracle_refine=int(values.get("oracle_refine", 1)),
            M=_int_or_none(values.get("M")),
            K=_int_or_none(values.get("K")),
            fixed_eps=[int(e) for e in values["fixed_eps"]] if values.get("fixed_eps") else None,
            p=float(values.get("p", 1.0)),
            h=float(values.get("h", 1.0)),
            out=values.get("out"),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigurationError):
            raise
        raise ConfigurationError(f"invalid config value: {str(e)}")


def horizon_list(values: Dict[str, Any]) -> List[int]:
    T_list = values.get("T_list")
    if not T_list:
        raise ConfigurationError("sweep needs T_list")
    if isinstance(T_list, str):
        T_list = [t for t in T_list.replace(",", " ").split() if t]
    try:
        return sorted({int(float(T)) for T in T_list})
    except ValueError as e:
        raise ConfigurationError(f"invalid T_list: {str(e)}")
