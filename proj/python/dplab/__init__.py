from ._dplab import (
    ConfigError,
    GeometryError,
    InvariantError,
    acceptance,
    config_hash,
    fit_slope,
    homogenize,
    indicator,
    run,
)

__all__ = [
    "ConfigError",
    "GeometryError",
    "InvariantError",
    "acceptance",
    "config_hash",
    "fit_slope",
    "homogenize",
    "indicator",
    "run",
]
