"""Exact and sampled boundary connectivity for critical loop percolation on a cylinder."""

from .dynamics import asm_count, stationary
from .matchings import NoncrossingMatching, enumerate_matchings, parse_matching
from .probabilities import (
    anti_cluster_prob, halfplane_anticluster, halfplane_prob, interpolate_Q,
    prob_submatching_brute, prob_submatching_ct,
)

__version__ = "0.1.0"

__all__ = [
    "NoncrossingMatching", "enumerate_matchings", "parse_matching", "asm_count",
    "stationary", "prob_submatching_brute", "prob_submatching_ct",
    "interpolate_Q", "halfplane_prob", "anti_cluster_prob", "halfplane_anticluster",
]
