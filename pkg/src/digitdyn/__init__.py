"""Dynamics of digit-power-sum maps S_{phi,b}: cycles, propagating lines, densities, searches."""
from .core import (
    BaseClassification,
    BaseExpansion,
    Cycle,
    Orbit,
    PowerMap,
    TableMap,
    enumerate_cycles,
    expand,
    orbit,
    step,
    stewart_bound,
)

__all__ = [
    "BaseClassification",
    "BaseExpansion",
    "Cycle",
    "Orbit",
    "PowerMap",
    "TableMap",
    "enumerate_cycles",
    "expand",
    "orbit",
    "step",
    "stewart_bound",
]
__version__ = "0.1.0"
