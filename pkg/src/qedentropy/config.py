"""Flat ``key = value`` parameter files and command-line overrides."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional

from .model import G_DEFAULT, PARAM_KEYS, ModelParams


class ConfigError(ValueError):
    pass


def parse_quantity(text: str) -> float:
    """A float, or a multiple of the reference coupling written ``0.1g``."""
    s = text.strip()
    try:
        if s.endswith("g"):
            head = s[:-1].strip().rstrip("*")
            return (float(head) if head else 1.0) * G_DEFAULT
        return float(s)
    except ValueError:
        raise ConfigError(f"cannot read {text!r} as a number") from None


def parse_assignment(line: str, allowed: Iterable[str] = PARAM_KEYS) -> tuple[str, float]:
    if "=" not in line:
        raise ConfigError(f"expected key = value, got {line!r}")
    key, value = (part.strip() for part in line.split("=", 1))
    allowed = tuple(allowed)
    if key not in allowed:
        raise ConfigError(f"unknown key {key!r}; allowed: {', '.join(allowed)}")
    return key, parse_quantity(value)


def read_config(path: str | Path) -> dict[str, float]:
    values: dict[str, float] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            key, value = parse_assignment(line)
        except ConfigError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
        values[key] = value
    return values


def load_params(
    path: Optional[str | Path] = None,
    overrides: Iterable[str] = (),
    base: Optional[ModelParams] = None,
) -> ModelParams:
    """Defaults, then file values, then ``key=value`` overrides."""
    values: dict[str, float] = {}
    if path is not None:
        values.update(read_config(path))
    for item in overrides:
        key, value = parse_assignment(item, PARAM_KEYS + ("g_Omega",))
        values[key] = value
    base = ModelParams() if base is None else base
    try:
        return base.with_(**values).validate()
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
