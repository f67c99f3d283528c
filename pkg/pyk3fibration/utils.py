"""Settings, logging setup and formatting helpers shared across the package."""

import json
import logging
import math
import os
import warnings
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

import yaml
from sympy import isprime

logger = logging.getLogger(__name__)

SETTINGS_FILE = "pyk3fibration.yaml"

DEFAULT_SETTINGS: Dict[str, Any] = {
    "log_level": "WARNING",
    "workers": 4,
    "max_intersection": 3,
    "progress": False,
}

_ENV_OVERRIDES = {
    "PYK3_LOG_LEVEL": "log_level",
    "PYK3_WORKERS": "workers",
    "PYK3_MAX_INTERSECTION": "max_intersection",
    "PYK3_PROGRESS": "progress",
}

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _coerce_setting(key: str, value: Any) -> Any:
    if key == "log_level":
        level = str(value).upper()
        if level not in _LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(_LOG_LEVELS)}, got {value!r}")
        return level
    if key == "progress":
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"Setting '{key}' must be an integer, got {value!r}") from None
    minimum = 1 if key == "workers" else 0
    if number < minimum:
        raise ValueError(f"Setting '{key}' must be at least {minimum}, got {number}")
    return number


def get_settings(path: Optional[str] = None) -> Dict[str, Any]:
    """Load runtime settings.

    Defaults are overridden by a YAML settings file and then by environment
    variables (``PYK3_LOG_LEVEL``, ``PYK3_WORKERS``, ``PYK3_MAX_INTERSECTION``,
    ``PYK3_PROGRESS``).

    Parameters
    ----------
    path : str, optional
        Settings file. Defaults to ``$PYK3_SETTINGS`` or ``pyk3fibration.yaml``
        in the working directory. A missing file is not an error.

    Returns
    -------
    dict
        Settings with keys ``log_level``, ``workers``, ``max_intersection`` and
        ``progress``.

    Raises
    ------
    ValueError
        If the file is not a mapping or a value cannot be coerced.
    """
    settings = dict(DEFAULT_SETTINGS)
    path = path or os.getenv("PYK3_SETTINGS") or SETTINGS_FILE

    if os.path.exists(path):
        with open(path) as f:
            loaded = yaml.safe_load(f) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"Settings file {path} must contain a mapping")
        for key, value in loaded.items():
            if key not in DEFAULT_SETTINGS:
                warnings.warn(f"Ignoring unknown setting '{key}' in {path}", UserWarning)
                continue
            settings[key] = _coerce_setting(key, value)
        logger.debug(f"Loaded settings from {path}")

    for env_name, key in _ENV_OVERRIDES.items():
        value = os.getenv(env_name)
        if value is not None:
            settings[key] = _coerce_setting(key, value)

    return settings


def configure_logging(level: Union[str, int] = "WARNING") -> None:
    """Attach a stream handler to the package logger."""
    package_logger = logging.getLogger("pyk3fibration")
    if not package_logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        package_logger.addHandler(handler)
    package_logger.setLevel(level)


def format_rational(value: Union[int, Fraction]) -> str:
    """Render an exact rational as ``p/q`` (or ``p`` when integral)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: Union[str, int]) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"Invalid rational number: {text!r}") from None


def format_extval(value: Union[int, float]) -> str:
    """Render a valuation, with ``inf`` for the valuation of zero."""
    if value == math.inf:
        return "inf"
    return str(int(value))


def parse_extval(text: Union[str, int, float]) -> Union[int, float]:
    if isinstance(text, str) and text.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    if text == math.inf:
        return math.inf
    value = int(text)
    if value < 0:
        raise ValueError(f"Valuations are non-negative, got {value}")
    return value


def to_json(data: Any) -> str:
    """Serialize a report with sorted keys so identical input gives identical text."""
    return json.dumps(data, sort_keys=True, indent=2)


def require_prime(p: int, name: str = "p") -> int:
    if not isinstance(p, int) or isinstance(p, bool) or not isprime(p):
        raise ValueError(f"{name} must be a prime number, got {p!r}")
    return p


def parse_int_list(text: str) -> List[int]:
    """Parse ``"1,1,1,3"`` into ``[1, 1, 1, 3]``."""
    items = [item.strip() for item in str(text).split(",")]
    if not items or any(item == "" for item in items):
        raise ValueError(f"Expected a comma separated list of integers, got {text!r}")
    try:
        return [int(item) for item in items]
    except ValueError:
        raise ValueError(f"Expected a comma separated list of integers, got {text!r}") from None
