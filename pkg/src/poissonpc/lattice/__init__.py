"""Weighted lattice-point sums over difference sets and 2-D geometry of numbers."""

from .geometry import (
    LatticeBody,
    MinimaResult,
    body_area,
    count_vs_minima_check,
    gauge,
    gauss_reduce,
    lattice_point_count,
    minkowski_check,
    successive_minima,
)
from .sums import (
    DifferenceWeights,
    DyadicBlock,
    count_S,
    count_S_dyadic,
    count_S_multipliers,
    count_sum_below,
    differences,
    dyadic_blocks,
    l1_norm,
    l2_norm_approx,
    l2_norm_sq,
    norm_sums_hold,
)
