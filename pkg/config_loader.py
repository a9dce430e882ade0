# -*- coding: utf-8 -*-
"""
Configuration Loader Module
Loads and validates YAML/JSON pipeline configuration files.

Precedence: built-in defaults < configuration file < command-line flags.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from config import (
    DEFAULT_BINS,
    DEFAULT_BURN_IN,
    DEFAULT_FRACTION,
    DEFAULT_OUT_DIR,
    DEFAULT_SEED,
    DEFAULT_STEP_HOURS,
    DEFAULT_STRETCH_A,
    DEFAULT_THRESHOLD,
    DEFAULT_TOTAL_SAMPLES,
    DEFAULT_WINDOW_HOURS,
)
from dynamics import ModelSpec
from inference import FitConfig
from validators import ConfigValidationError, InvalidWindow, check_fraction, check_positive, check_window

logger = logging.getLogger(__name__)

SETTING_KEYS = (
    "window", "step", "fraction", "models", "samples", "burn_in", "walkers",
    "stretch_a", "seed", "jobs", "out_dir", "threshold", "bins", "log_scale", "prior",
)
SECTION_KEYS = ("scenarios", "mixture")

DEFAULT_SETTINGS: Dict[str, Any] = {
    "window": DEFAULT_WINDOW_HOURS,
    "step": DEFAULT_STEP_HOURS,
    "fraction": DEFAULT_FRACTION,
    "models": ["sir"],
    "samples": DEFAULT_TOTAL_SAMPLES,
    "burn_in": DEFAULT_BURN_IN,
    "walkers": None,
    "stretch_a": DEFAULT_STRETCH_A,
    "seed": DEFAULT_SEED,
    "jobs": 1,
    "out_dir": DEFAULT_OUT_DIR,
    "threshold": DEFAULT_THRESHOLD,
    "bins": DEFAULT_BINS,
    "log_scale": False,
    "prior": {},
}


@dataclass
class PipelineConfig:
    """Resolved settings for one pipeline run."""

    window: float = DEFAULT_WINDOW_HOURS
    step: float = DEFAULT_STEP_HOURS
    fraction: float = DEFAULT_FRACTION
    models: List[ModelSpec] = field(default_factory=lambda: [ModelSpec("sir")])
    fit: FitConfig = field(default_factory=FitConfig)
    out_dir: Path = Path(DEFAULT_OUT_DIR)
    jobs: int = 1
    threshold: float = DEFAULT_THRESHOLD
    bins: int = DEFAULT_BINS
    log_scale: bool = False
    scenarios: List[Dict[str, Any]] = field(default_factory=list)
    mixture: Optional[Any] = None

    @classmethod
    def from_settings(cls, settings: Dict[str, Any]) -> "PipelineConfig":
        """
        Build and validate a config from a flat settings mapping.

        Raises:
            ConfigValidationError: Naming the first offending key
        """
        merged = dict(DEFAULT_SETTINGS)
        merged.update({k: v for k, v in settings.items() if v is not None})

        try:
            check_window(merged["window"], merged["step"])
        except InvalidWindow as exc:
            raise ConfigValidationError(f"window/step: {exc}")
        fraction = check_fraction(merged["fraction"], "fraction", ConfigValidationError)

        fit = FitConfig(
            total_samples=_as_int(merged["samples"], "samples"),
            burn_in_fraction=float(merged["burn_in"]),
            walkers=None if merged["walkers"] is None else _as_int(merged["walkers"], "walkers"),
            stretch_a=float(merged["stretch_a"]),
            seed=_as_int(merged["seed"], "seed"),
            prior=dict(merged["prior"] or {}),
        ).validate()

        jobs = _as_int(merged["jobs"], "jobs")
        check_positive(jobs, "jobs", ConfigValidationError)
        bins = _as_int(merged["bins"], "bins")
        check_positive(bins, "bins", ConfigValidationError)

        return cls(
            window=float(merged["window"]),
            step=float(merged["step"]),
            fraction=fraction,
            models=parse_models(merged["models"]),
            fit=fit,
            out_dir=Path(merged["out_dir"]),
            jobs=jobs,
            threshold=float(merged["threshold"]),
            bins=bins,
            log_scale=bool(merged["log_scale"]),
            scenarios=list(settings.get("scenarios") or []),
            mixture=settings.get("mixture"),
        )


def _as_int(value: Any, name: str) -> int:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigValidationError(f"{name} must be an integer, got {value!r}")
    if not number.is_integer():
        raise ConfigValidationError(f"{name} must be an integer, got {value!r}")
    return int(number)


def parse_models(raw: Any) -> List[ModelSpec]:
    """
    Parse model kinds from a list or a comma-separated string.

    Raises:
        ConfigValidationError: If a kind is unknown or the list is empty
    """
    items = raw.split(",") if isinstance(raw, str) else list(raw or [])
    models = []
    for item in items:
        text = str(item).strip()
        if not text:
            continue
        try:
            spec = ModelSpec.parse(text)
        except ValueError as exc:
            raise ConfigValidationError(f"models: {exc}")
        if spec not in models:
            models.append(spec)
    if not models:
        raise ConfigValidationError("models: at least one model kind is required")
    return models


class ConfigLoader:
    """Loads and validates pipeline configuration files."""

    def __init__(self, config_path: str):
        """
        Initialize the configuration loader.

        Args:
            config_path (str): Path to the configuration file (YAML or JSON)
        """
        self.config_path = Path(config_path)
        self.config = None

    def load(self) -> Dict[str, Any]:
        """
        Load configuration from file.

        Returns:
            Dict[str, Any]: Loaded configuration

        Raises:
            FileNotFoundError: If config file doesn't exist
            ConfigValidationError: If config format or content is invalid
        """
        if not self.config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {self.config_path}")

        suffix = self.config_path.suffix.lower()
        with open(self.config_path, "r", encoding="utf-8") as f:
            try:
                if suffix in (".yaml", ".yml"):
                    self.config = yaml.safe_load(f)
                elif suffix == ".json":
                    self.config = json.load(f)
                else:
                    raise ConfigValidationError(f"Unsupported config format: {suffix}")
            except (yaml.YAMLError, json.JSONDecodeError) as exc:
                raise ConfigValidationError(f"Cannot parse {self.config_path}: {exc}")

        if self.config is None:
            self.config = {}
        self.validate_config()
        logger.debug("loaded configuration from %s", self.config_path)
        return self.config

    def validate_config(self):
        """
        Validate the configuration structure.

        Raises:
            ConfigValidationError: If configuration is invalid
        """
        if not isinstance(self.config, dict):
            raise ConfigValidationError("Configuration must be a mapping at the top level")

        unknown = sorted(set(self.config) - set(SETTING_KEYS) - set(SECTION_KEYS))
        if unknown:
            raise ConfigValidationError(f"Unknown configuration keys: {unknown}")

        if "prior" in self.config and not isinstance(self.config["prior"] or {}, dict):
            raise ConfigValidationError("'prior' must be a mapping of bound names to values")

        scenarios = self.config.get("scenarios") or []
        if not isinstance(scenarios, list) or not all(isinstance(s, dict) for s in scenarios):
            raise ConfigValidationError("'scenarios' must be a list of mappings")

        # full value checks
        PipelineConfig.from_settings(self.get_pipeline_settings())

    def get_pipeline_settings(self) -> Dict[str, Any]:
        """
        Get the flat pipeline settings present in the file.

        Returns:
            Dict[str, Any]: Settings keyed by SETTING_KEYS
        """
        if self.config is None:
            self.load()
        return {key: self.config[key] for key in SETTING_KEYS if key in self.config}

    def get_scenarios(self) -> List[Dict[str, Any]]:
        """
        Get synthetic scenario definitions.

        Returns:
            List[Dict[str, Any]]: Scenario mappings
        """
        if self.config is None:
            self.load()
        return list(self.config.get("scenarios") or [])

    def get_mixture(self) -> Optional[Any]:
        if self.config is None:
            self.load()
        return self.config.get("mixture")


def load_pipeline_config(
    config_path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> PipelineConfig:
    """
    Convenience function to resolve a pipeline configuration.

    Args:
        config_path (Optional[str]): YAML/JSON file, or None for defaults only
        overrides (Optional[Dict[str, Any]]): Command-line values; None entries are ignored

    Returns:
        PipelineConfig: Validated configuration
    """
    settings: Dict[str, Any] = {}
    if config_path:
        loader = ConfigLoader(config_path)
        loader.load()
        settings.update(loader.get_pipeline_settings())
        settings["scenarios"] = loader.get_scenarios()
        settings["mixture"] = loader.get_mixture()

    for key, value in (overrides or {}).items():
        if value is not None:
            settings[key] = value

    return PipelineConfig.from_settings(settings)
