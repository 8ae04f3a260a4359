"""Discrete Orlicz-Aleksandrov problem for C-pseudo-cones."""

from .cone import PointedCone, cap_area, dual_cone, orthant, sample_cap
from .curvature import CurvatureMeasure, curvature_measure, gauss_cells
from .functional import OrliczFunction, OrliczGauge, build_gauge, entropy, orlicz_from_spec
from .pseudocone import HullPseudoCone, WulffPseudoCone, copolar, distance_origin, radial, support_bar
from .solver import DiscreteMeasure, SolveReport, SolverOptions, enlarge_cone, solve_compact, solve_full

__all__ = [
    "PointedCone",
    "cap_area",
    "dual_cone",
    "orthant",
    "sample_cap",
    "CurvatureMeasure",
    "curvature_measure",
    "gauss_cells",
    "OrliczFunction",
    "OrliczGauge",
    "build_gauge",
    "entropy",
    "orlicz_from_spec",
    "HullPseudoCone",
    "WulffPseudoCone",
    "copolar",
    "distance_origin",
    "radial",
    "support_bar",
    "DiscreteMeasure",
    "SolveReport",
    "SolverOptions",
    "enlarge_cone",
    "solve_compact",
    "solve_full",
]

__version__ = "0.1.0"
