"""Exact point-line incidence counting on integer lattice grids."""

from .constructions import (
    ExplicitLineSet,
    FamilyParams,
    LatticeLine,
    PointGrid,
    elekes_lines,
    erdos_lines,
    family_lines_simplified,
    family_params,
)
from .engine import (
    IncidenceReport,
    ReducedSlope,
    brute_force_report,
    count_family,
    enumerate_slopes,
    explicit_set_incidences,
    run_counts,
    slope_family_stats,
    staircase_check,
)
from .estimator import C_MAIN, predict, sweep
from .totients import build_tables

__version__ = "0.1.0"
