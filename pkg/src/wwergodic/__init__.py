"""Weighted ergodic averages on Z^d with a finite-window numerical toolkit."""

__version__ = "0.1.0"

from .weights import (
    TorusPoint,
    TrigPolynomial,
    WeightSequence,
    correlation_estimate,
    correlation_table,
    amplitude_estimate,
    marcinkiewicz_seminorm,
    example59,
)
from .spectral import (
    TorusMeasure,
    affinity,
    empirical_density,
    point_mass,
    wiener_continuity,
)

__all__ = [
    "TorusPoint",
    "TrigPolynomial",
    "WeightSequence",
    "correlation_estimate",
    "correlation_table",
    "amplitude_estimate",
    "marcinkiewicz_seminorm",
    "example59",
    "TorusMeasure",
    "affinity",
    "empirical_density",
    "point_mass",
    "wiener_continuity",
]
