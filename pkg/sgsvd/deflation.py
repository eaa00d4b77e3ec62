"""
This module extracts several factors in turn by residual subtraction: fit one rank-one factor,
subtract d * u * v^T from the matrix, and fit again on the residual.

Classes:
    - FactorSeries: The factors, their traces and the residual norms of one deflation run.

Functions:
    - deflate: X - d * u * v^T.
    - fit_rank_k: Repeats fit_rank_one and deflate k_factors times.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from sgsvd.errors import ConfigError, DegenerateUpdateError, DimensionMismatchError
from sgsvd.factor import FactorTriple
from sgsvd.matrix import DenseMatrix
from sgsvd.solver import IterationTrace, fit_rank_one

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FactorSeries:
    """
    Result of a deflation run.

    Attributes:
        factors (tuple[FactorTriple, ...]): Factors in extraction order.
        traces (tuple[IterationTrace, ...]): Convergence record for each factor.
        residual_norms (tuple[float, ...]): Frobenius norm of the residual after each deflation.
    """

    factors: Tuple[FactorTriple, ...]
    traces: Tuple[IterationTrace, ...]
    residual_norms: Tuple[float, ...]

    def __len__(self):
        return len(self.factors)

    @property
    def converged(self):
        """
        Convergence flag of every factor, in order.
        """
        return tuple(trace.converged for trace in self.traces)

    @property
    def singular_values(self):
        return tuple(factor.d for factor in self.factors)


def deflate(x, f):
    """
    Returns X - d * u * v^T as a new matrix; X itself is untouched.

    :param x: DenseMatrix (or 2-D array).
    :param f: The factor to subtract.
    :raises DimensionMismatchError: If the factor does not match the matrix shape.
    """
    x = x if isinstance(x, DenseMatrix) else DenseMatrix(x)
    if f.u.shape != (x.n_rows,) or f.v.shape != (x.n_cols,):
        raise DimensionMismatchError(
            f"factor of shape ({len(f.u)}, {len(f.v)}) does not match a {x.n_rows} x {x.n_cols} matrix")
    return DenseMatrix(x.values - f.d * np.outer(f.u, f.v))


def fit_rank_k(x, g_rows=None, g_cols=None, cfg=None, k_factors=1):
    """
    Extracts k_factors factors by alternating fit_rank_one and deflate. Each factor starts from a
    fresh initialization on the current residual; factors are not forced to be orthogonal.
    Factors that did not converge are kept and flagged in their trace.

    :param x: DenseMatrix (or 2-D array).
    :param g_rows: Row prior graph or None.
    :param g_cols: Column prior graph or None.
    :param cfg: SolverConfig shared by every factor.
    :param k_factors: Number of factors, >= 1.
    :return: FactorSeries.
    :raises ConfigError: If k_factors < 1.
    :raises DegenerateUpdateError: With `factor_index` set, if a factor's update collapses.
    """
    if k_factors < 1:
        raise ConfigError(f"k_factors must be >= 1, got {k_factors}")
    residual = x if isinstance(x, DenseMatrix) else DenseMatrix(x)
    factors, traces, norms = [], [], []
    for index in range(k_factors):
        try:
            factor, trace = fit_rank_one(residual, g_rows, g_cols, cfg)
        except DegenerateUpdateError as exc:
            raise DegenerateUpdateError(str(exc), factor_index=index) from exc
        residual = deflate(residual, factor)
        factors.append(factor)
        traces.append(trace)
        norms.append(residual.frobenius_norm())
        logger.info("factor %d: d = %.12g, converged = %s, residual norm = %.12g",
                    index, factor.d, trace.converged, norms[-1])
    return FactorSeries(factors=tuple(factors), traces=tuple(traces), residual_norms=tuple(norms))
