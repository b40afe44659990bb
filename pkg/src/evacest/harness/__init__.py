"""Validation harness: component scenario tests and estimation-vs-simulation
experiments, with machine-readable reports."""

from .imo import (imo_corner_test, imo_counterflow_test, imo_exit_alloc_test,
                  imo_walk_test, nearest_exit_assignment)
from .showcase import orca_showcase
from .compare import (ComparisonReport, compare_environments, graph_from_chain,
                      load_suite, replicate_chain, NIGHTCLUB_REFERENCE)

__all__ = [
    "imo_walk_test", "imo_corner_test", "imo_counterflow_test",
    "imo_exit_alloc_test", "nearest_exit_assignment", "orca_showcase",
    "ComparisonReport", "compare_environments", "graph_from_chain",
    "load_suite", "replicate_chain", "NIGHTCLUB_REFERENCE",
]
