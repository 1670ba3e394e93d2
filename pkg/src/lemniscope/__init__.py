"""Lemniscates of rational maps as trajectories of -(r'/r)^2 dz^2.

Critical data, critical-graph tracing, Circle/Ring domain decomposition,
Teichmüller checks and lemniscate fingerprints.
"""

__version__ = "0.1.0"

from .polyfield import Polynomial, RootSet, roots
from .qdmodel import (
    RationalMap,
    QuadraticDifferential,
    build,
    critical_values,
    connectivity_predicate,
    properness_test,
    Properness,
)
from .tracer import trace_level, trace_critical, level_seeds, arg_monotonicity_check
from .graphbuilder import build_graph, domain_configurations, lemniscate_components, connecting_trajectory
from .teichcheck import polygon_from_face, polygon_from_loop, teichmuller_sum

__all__ = [
    "__version__",
    "Polynomial",
    "RootSet",
    "roots",
    "RationalMap",
    "QuadraticDifferential",
    "build",
    "critical_values",
    "connectivity_predicate",
    "properness_test",
    "Properness",
    "trace_level",
    "trace_critical",
    "level_seeds",
    "arg_monotonicity_check",
    "build_graph",
    "domain_configurations",
    "lemniscate_components",
    "connecting_trajectory",
    "polygon_from_face",
    "polygon_from_loop",
    "teichmuller_sum",
]
