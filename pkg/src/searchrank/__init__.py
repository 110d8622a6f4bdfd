"""Simulation of PageRank-based quantum search on directed networks."""

from ._kernels import BACKEND
from .analysis import first_maximum, fit_power_law, global_maximum, kendall_tau, reference_time
from .google import GoogleMatrix, classical_pagerank, connectivity_matrix, google_from_graph, google_matrix, patch_dangling
from .netgen import DirectedGraph, ScaleFreeParams, generate_scale_free, load_edge_list, store_edge_list
from .ranks import (
    ProbabilityCurve,
    quantum_pagerank,
    quantum_searchrank_curve,
    randomized_searchrank,
    searchrank_curves,
    semiclassical_matrix,
    semiclassical_searchrank,
)
from .szegedy import OracleSet, WalkState, build_sqrt_columns

__version__ = "0.1.0"
