"""Nanogrid cluster P2P power trading simulator and RL trainer."""

from nanogrid._core import (
    ConfigError,
    ContractError,
    DomainError,
    Environment,
    __version__,
    allocate_proportional,
    config_json,
    progressive_rate,
    savings_percent,
    tou_rate,
    train,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "DomainError",
    "Environment",
    "__version__",
    "allocate_proportional",
    "config_json",
    "progressive_rate",
    "savings_percent",
    "tou_rate",
    "train",
]
