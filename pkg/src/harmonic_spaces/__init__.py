"""Numerical function-space functionals for planar harmonic maps on the unit disk."""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = [
    "ArgError", "DivergenceSuspected", "DomainError", "HarmonicSpacesError", "InternalMismatch", "NotApplicable",
    "NotSelfMap", "NotSensePreserving", "SingularityError", "TailError", "Jet3", "Z", "const", "derivative",
    "eval_jet", "evaluate", "finite_difference_jet", "HarmonicMap", "jacobian", "pre_schwarzian", "schwarzian",
    "shear", "WeightedIntegralSpec", "integrate_disk", "SupSearchConfig", "sup_search",
]

from .errors import (  # noqa: E402
    ArgError, DivergenceSuspected, DomainError, HarmonicSpacesError, InternalMismatch, NotApplicable,
    NotSelfMap, NotSensePreserving, SingularityError, TailError,
)
from .jets import Jet3, Z, const, derivative, eval_jet, evaluate, finite_difference_jet  # noqa: E402
from .harmonic import HarmonicMap, jacobian, pre_schwarzian, schwarzian, shear  # noqa: E402
from .quadrature import WeightedIntegralSpec, integrate_disk  # noqa: E402
from .geometry import SupSearchConfig, sup_search  # noqa: E402
