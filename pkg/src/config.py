"""
Configuration management module.
Holds the toolkit settings shared by the command-line commands.
"""
from dataclasses import dataclass, replace
from typing import Any

from .errors import ConfigError
from .validation import Strictness


@dataclass(frozen=True)
class ToolkitConfig:
    """
    Toolkit settings.

    Attributes:
        strictness: How endpoint-compatibility findings are graded
        dot_label_width: Maximum node text length in DOT labels before truncation
        color_by_label: Whether DOT output fills nodes and colors edges by label
        stats_top_k: Number of most frequent node labels in the combined share
        stats_workers: Threads used to load corpus files
    """
    strictness: Strictness = Strictness.LENIENT
    dot_label_width: int = 60
    color_by_label: bool = True
    stats_top_k: int = 4
    stats_workers: int = 4


DEFAULT_CONFIG = ToolkitConfig()


def build_config(**overrides: Any) -> ToolkitConfig:
    """
    Build settings from defaults plus overrides.

    Args:
        **overrides: Field values to replace; None values keep the default

    Returns:
        Validated ToolkitConfig

    Raises:
        ConfigError: If a field is unknown or a value is out of range
    """
    known = set(ToolkitConfig.__dataclass_fields__)
    for field in overrides:
        if field not in known:
            raise ConfigError(f"Unknown configuration field: {field}")

    values = {k: v for k, v in overrides.items() if v is not None}

    if "strictness" in values and not isinstance(values["strictness"], Strictness):
        try:
            values["strictness"] = Strictness(values["strictness"])
        except ValueError:
            raise ConfigError(
                f"strictness must be one of: {', '.join(s.value for s in Strictness)}"
            ) from None

    config = replace(DEFAULT_CONFIG, **values)

    # Validate numeric ranges
    if not isinstance(config.dot_label_width, int) or config.dot_label_width < 4:
        raise ConfigError("dot_label_width must be an integer >= 4")
    if not isinstance(config.stats_top_k, int) or config.stats_top_k < 1:
        raise ConfigError("stats_top_k must be a positive integer")
    if not isinstance(config.stats_workers, int) or config.stats_workers < 1:
        raise ConfigError("stats_workers must be a positive integer")

    return config
