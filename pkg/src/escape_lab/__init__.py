"""Expected escape times from unit balls along unit-speed paths."""

from escape_lab.closedform import assemble_expectation, expected_linear_escape
from escape_lab.escape import (
    MeanEscapeEstimate,
    mean_escape_line_quadrature,
    mean_escape_monte_carlo,
    mean_escape_quadrature,
    non_escape_area,
)
from escape_lab.geom import DiskConfig, intersection_area_2d, lens_area, union_area_2d
from escape_lab.paths import Arc, Line, PolyChain, path_eval

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "DiskConfig",
    "Line",
    "MeanEscapeEstimate",
    "PolyChain",
    "assemble_expectation",
    "expected_linear_escape",
    "intersection_area_2d",
    "lens_area",
    "mean_escape_line_quadrature",
    "mean_escape_monte_carlo",
    "mean_escape_quadrature",
    "non_escape_area",
    "path_eval",
    "union_area_2d",
]
