"""Numerical workbench for locally conformally Kaehler structures on Hopf manifolds."""

from .charts import (
    Chart,
    ChartKind,
    ChartPoint,
    HopfData,
    SmoothMap,
    TangentVector,
    map_H,
    map_H_inverse,
    pushforward,
)
from .hopf import HopfStructure, build_forms_and_metric
from .jets import Jet, JetScalar
from .verify import CheckResult, run_suite

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "ChartKind",
    "ChartPoint",
    "CheckResult",
    "HopfData",
    "HopfStructure",
    "Jet",
    "JetScalar",
    "SmoothMap",
    "TangentVector",
    "build_forms_and_metric",
    "map_H",
    "map_H_inverse",
    "pushforward",
    "run_suite",
]
