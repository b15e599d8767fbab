import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ValidationError

from ..exceptions import ConfigError, FileOperationError
from ..schema import AnalysisConfig, AppSettings
from .io import load_json

logger = logging.getLogger(__name__)

SETTINGS_ENV = "CAPQ_SETTINGS"


def _deep_merge(source: Dict, destination: Dict) -> Dict:
    """
    Recursively merges source dict into destination dict.
    """
    for key, value in source.items():
        if isinstance(value, dict):
            node = destination.setdefault(key, {})
            _deep_merge(value, node)
        else:
            destination[key] = value
    return destination


def load_settings(path: Optional[str] = None) -> AppSettings:
    """
    Loads application settings from a TOML file (CAPQ_SETTINGS or
    ./settings.toml), merged over the defaults of AppSettings. A file that
    cannot be parsed or validated is reported and the defaults are used.
    """
    path = path or os.environ.get(SETTINGS_ENV, "settings.toml")
    merged = AppSettings().model_dump()

    try:
        with open(path, "rb") as f:
            merged = _deep_merge(tomllib.load(f), merged)
    except FileNotFoundError:
        logger.debug("no settings file at '%s', using defaults", path)
    except tomllib.TOMLDecodeError as e:
        logger.warning("could not parse '%s', using default settings: %s", path, e)
        return AppSettings()

    try:
        return AppSettings.model_validate(merged)
    except ValidationError as e:
        logger.warning("settings validation failed, using default settings: %s", e)
        return AppSettings()


def _override_seeds(data: Dict[str, Any], seed: int) -> Dict[str, Any]:
    data = dict(data)
    for block in ("monte_carlo", "bootstrap"):
        if block == "bootstrap" and block not in data:
            continue
        section = dict(data.get(block) or {})
        section["seed"] = seed
        data[block] = section
    return data


def parse_config(data: Any, seed: Optional[int] = None) -> AnalysisConfig:
    """Validates an already-decoded config; `seed` replaces every seed in it."""
    if not isinstance(data, dict):
        raise ConfigError(f"configuration must be a JSON object, got {type(data).__name__}")
    if seed is not None:
        data = _override_seeds(data, seed)
    try:
        return AnalysisConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def load_config(path: str, seed: Optional[int] = None) -> AnalysisConfig:
    try:
        data = load_json(path)
    except FileOperationError as e:
        raise ConfigError(str(e)) from e
    return parse_config(data, seed)


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def defaults_applied(model: BaseModel, prefix: str = "") -> List[Dict[str, Any]]:
    """Dotted paths and values of every field left at its default, in declaration order."""
    resolved = getattr(model, "applied_defaults", None)
    if resolved is not None:
        # models that fill in their own defaults report only the fields in effect
        return [{"field": f"{prefix}{name}", "value": _plain(getattr(model, name))} for name in resolved]
    applied: List[Dict[str, Any]] = []
    for name in type(model).model_fields:
        value = getattr(model, name)
        path = f"{prefix}{name}"
        if name not in model.model_fields_set and hasattr(value, "applied_defaults"):
            applied.extend(defaults_applied(value, path + "."))
        elif name not in model.model_fields_set:
            applied.append({"field": path, "value": _plain(value)})
        elif isinstance(value, BaseModel):
            applied.extend(defaults_applied(value, path + "."))
    return applied


# Create a single instance to be imported by other modules
settings = load_settings()
