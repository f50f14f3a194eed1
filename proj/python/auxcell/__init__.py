"""Four-phase inverse homogenization with two level sets."""

from ._core import (
    AuxcellError,
    ConfigError,
    Optimizer,
    apparent_poisson,
    homogenize,
    isotropic_tensor,
    parse_config,
    preset,
    preset_names,
)

__all__ = [
    "AuxcellError",
    "ConfigError",
    "Optimizer",
    "apparent_poisson",
    "homogenize",
    "isotropic_tensor",
    "parse_config",
    "preset",
    "preset_names",
]
