"""Structured text config files (`key = value` per line, dotenv syntax)."""
import io
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Type, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ValidationError

from crossvote.errors import ConfigError


def _coerce(value: str) -> Union[str, list]:
    """Comma-separated values become lists (e.g. hidden_dims = 64, 64)."""
    if "," in value:
        return [part.strip() for part in value.split(",") if part.strip()]
    return value


def _collect(parsed: Mapping[str, Optional[str]], source: str) -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for key, raw in parsed.items():
        if raw is None:
            raise ConfigError(f"{source}: expected 'key = value', got {key!r}")
        values[key] = _coerce(raw.strip())
    return values


def parse_config_text(text: str, source: str = "<string>") -> Dict[str, Any]:
    """Parse `key = value` lines; `#` starts a comment, quotes are stripped."""
    return _collect(dotenv_values(stream=io.StringIO(text), interpolate=False), source)


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return _collect(dotenv_values(path, interpolate=False, encoding="utf-8"), str(path))


def parse_overrides(pairs: Iterable[str]) -> Dict[str, Any]:
    """Turn `key=value` command-line pairs into a dict."""
    return parse_config_text("\n".join(pairs), source="--set")


def split_by_model(values: Mapping[str, Any], models: Mapping[str, Type[BaseModel]]) -> Dict[str, Dict[str, Any]]:
    """
    Route flat keys to the model that declares them. Unknown keys are an
    error; a key declared by several models goes to all of them.
    """
    routed: Dict[str, Dict[str, Any]] = {name: {} for name in models}
    for key, value in values.items():
        owners = [name for name, model in models.items() if key in model.model_fields]
        if not owners:
            raise ConfigError(f"unknown config key: {key}")
        for name in owners:
            routed[name][key] = value
    return routed


def build_model(model: Type[BaseModel], values: Mapping[str, Any]) -> BaseModel:
    try:
        return model(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid {model.__name__}: {e}") from e
