"""Minimum-cost visiting orders over phase-space point sets.

Points are (position, velocity) pairs; branches between them are cubic
trajectories scaled to an acceleration bound. Nearest-neighbor search is
compared against exhaustive enumeration and random path sampling.
"""
from .costspace import (CostKind, CostMatrix, asymmetry_report, build_cost_matrices,
                        build_cost_matrix, triangle_report)
from .grid import Grid, PhasePoint, index_to_point, make_random_grid, make_rect_grid
from .search import Path, SearchResult, exhaustive_search, multi_nn, nn_search, path_cost, random_sample
from .stats import (Moments, ZReport, compare, histogram, normal_cdf, normal_quantile, p_lower_n,
                    qq_data, summarize, z_scores)
from .store import content_hash
from .trajectory import (AccelBound, CubicTraj, energy_cost, evaluate, scale_duration, solve_coeffs,
                         time_cost)

__version__ = "0.1.0"
