"""Project-level settings for search bounds and certificate depth."""

from __future__ import annotations

import logging

from dataclasses import dataclass, fields, replace
from typing import TYPE_CHECKING, Any


try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib  # type: ignore[no-redef]

import yaml

from gog_hhg.words import DEFAULT_NODE_CAP


if TYPE_CHECKING:
    from pathlib import Path

logger = logging.getLogger(__name__)

TOOL_TABLE = "gog-hhg"
YAML_NAME = "gog-hhg.yml"


@dataclass(frozen=True)
class Settings:
    """User-provided gog-hhg configuration.

    Attributes:
        node_cap: Most states a bounded conjugator search may expand.
        oracle_syllables: Move bound of the brute-force balance oracle.
        oracle_exponent: Exponent bound of the brute-force balance oracle.
        depth: Default number of distortion rows.
    """

    node_cap: int = DEFAULT_NODE_CAP
    oracle_syllables: int = 4
    oracle_exponent: int = 4
    depth: int = 10

    def override(self, **values: int | None) -> Settings:
        """Apply explicit command-line values on top of the file settings.

        Args:
            **values: Setting names to values; ``None`` leaves a setting alone.

        Returns:
            The updated settings.
        """
        return replace(self, **{name: value for name, value in values.items() if value is not None})


def _load_pyproject_config(project_dir: Path) -> dict[str, Any] | None:
    """Load gog-hhg configuration from pyproject.toml.

    Args:
        project_dir: Directory holding pyproject.toml.

    Returns:
        The ``[tool.gog-hhg]`` table, or ``None`` if the file or table is
        missing.
    """
    pyproject_path = project_dir / "pyproject.toml"
    if not pyproject_path.exists():
        return None
    try:
        with pyproject_path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError:
        logger.warning("Failed to parse %s, skipping", pyproject_path)
        return None
    return data.get("tool", {}).get(TOOL_TABLE)


def _load_yaml_config(project_dir: Path) -> dict[str, Any] | None:
    """Load gog-hhg configuration from gog-hhg.yml.

    Args:
        project_dir: Directory holding gog-hhg.yml.

    Returns:
        The mapping in the file, or ``None`` if it is missing or unusable.
    """
    yaml_path = project_dir / YAML_NAME
    if not yaml_path.exists():
        return None
    try:
        with yaml_path.open() as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError:
        logger.warning("Failed to parse %s, skipping", yaml_path)
        return None
    if not isinstance(data, dict):
        logger.warning("Expected a mapping in %s, skipping", yaml_path)
        return None
    return data


def _coerce_int(value: object, *, default: int) -> int:
    """Coerce a config value to a positive integer.

    Args:
        value: Raw value from TOML or YAML.
        default: Fallback when the value cannot be interpreted.

    Returns:
        The coerced integer.
    """
    if isinstance(value, bool):
        pass
    elif isinstance(value, int) and value > 0:
        return value
    elif isinstance(value, str) and value.strip().isdigit() and int(value) > 0:
        return int(value)
    elif value is None:
        return default
    logger.warning("Invalid integer config value %r; using %s", value, default)
    return default


def load_settings(project_dir: Path) -> Settings:
    """Load settings with pyproject-over-YAML precedence.

    Args:
        project_dir: The directory to look in.

    Returns:
        The resolved settings; defaults when no configuration exists.
    """
    config = _load_pyproject_config(project_dir)
    if config is None:
        config = _load_yaml_config(project_dir)
    if config is None:
        return Settings()
    defaults = Settings()
    known = {field.name for field in fields(Settings)}
    for key in sorted(set(config) - known):
        logger.warning("Unknown setting %r ignored", key)
    values = {
        name: _coerce_int(config.get(name), default=getattr(defaults, name))
        for name in sorted(known)
    }
    return Settings(**values)
