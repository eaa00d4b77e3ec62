"""
The `sgsvd` package provides sparse graph-regularized rank-one SVD solvers (L0-sgSVD*, L1-sgSVD*,
classical sgSVD and L0SVD) together with the matrix, graph and factor value types they operate on,
and a deflation loop that extracts several factors in turn.
"""

from sgsvd.errors import (
    SgsvdError,
    ConfigError,
    DimensionMismatchError,
    GraphError,
    DegenerateUpdateError,
    FormatError,
)
from sgsvd.matrix import DenseMatrix
from sgsvd.graph import PriorGraph, LaplacianMode, laplacian_apply, neighbor_sum, normalized_degree
from sgsvd.factor import FactorTriple
from sgsvd.config import Variant, DenominatorMode, SweepOrder, InitMode, SolverConfig
from sgsvd.updates import project_top_k, restore_signs, update_l1, update_l0
from sgsvd.solver import IterationTrace, init_v, singular_value, fit_rank_one
from sgsvd.deflation import FactorSeries, deflate, fit_rank_k

__version__ = "1.0.0"
