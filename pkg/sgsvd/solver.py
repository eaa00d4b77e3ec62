"""
This module implements the alternating iterative sparse projection loop that fits one rank-one factor.

Each outer iteration computes z = X v and updates u, then z = X^T u and updates v, and records
d = z^T v (= u^T X v). The loop stops once |d_t - d_(t-1)| < epsilon or after max_iter iterations.

Classes:
    - IterationTrace: The sequence of d estimates and the convergence flag of one fit.

Functions:
    - init_v: Initial unit right vector (power iteration or seeded Gaussian).
    - singular_value: u^T X v.
    - fit_rank_one: Runs the alternating loop for the configured variant.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from sgsvd.config import InitMode, SolverConfig, Variant
from sgsvd.errors import DegenerateUpdateError, DimensionMismatchError
from sgsvd.factor import FactorTriple
from sgsvd.graph import PriorGraph
from sgsvd.matrix import DenseMatrix
from sgsvd.updates import update_rule_for

logger = logging.getLogger(__name__)

POWER_STEPS = 50


@dataclass(frozen=True)
class IterationTrace:
    """
    Convergence record of one rank-one fit.

    Attributes:
        d_history (tuple[float, ...]): d after each outer iteration.
        iterations (int): Number of outer iterations run.
        converged (bool): True if the last change in d was below epsilon.
    """

    d_history: Tuple[float, ...]
    iterations: int
    converged: bool

    @property
    def final_change(self):
        """
        |d_last - d_previous|, or None when fewer than two iterations ran.
        """
        if len(self.d_history) < 2:
            return None
        return abs(self.d_history[-1] - self.d_history[-2])


def _as_matrix(x):
    return x if isinstance(x, DenseMatrix) else DenseMatrix(x)


def _power_steps(x, v):
    for _ in range(POWER_STEPS):
        w = x.transpose_times(x.times(v))
        norm = np.linalg.norm(w)
        if norm == 0:
            return None
        v = w / norm
    return v


def init_v(x, init=InitMode.POWER_ITERATION, seed=0):
    """
    Returns the starting right vector of unit 2-norm.

    POWER_ITERATION takes 50 plain power steps on X^T X from the all-ones direction. If X^T X maps
    that direction to zero, it takes 50 power steps from the unit vector of the column with the
    largest norm instead. SEEDED_RANDOM draws standard normal entries from
    `numpy.random.default_rng(seed)`.

    :param x: The data matrix.
    :param init: Initialization mode.
    :param seed: Seed used by SEEDED_RANDOM.
    :raises DegenerateUpdateError: If X is the zero matrix.
    """
    x = _as_matrix(x)
    if x.is_zero():
        raise DegenerateUpdateError("cannot initialize on an all-zero matrix")
    p = x.n_cols

    if init is InitMode.SEEDED_RANDOM:
        v = np.random.default_rng(seed).standard_normal(p)
        norm = np.linalg.norm(v)
        return v / norm

    v = _power_steps(x, np.full(p, 1.0 / np.sqrt(p)))
    if v is None:
        logger.warning("power iteration collapsed to zero; restarting from the largest column")
        column = np.zeros(p)
        column[int(np.argmax(np.linalg.norm(x.values, axis=0)))] = 1.0
        # entry j of X^T X e_j is the squared column norm, never zero here
        v = _power_steps(x, column)
    return v


def singular_value(x, u, v):
    """
    Returns d = u^T X v, the optimal scale for fixed unit vectors u and v.

    :raises DimensionMismatchError: If u or v does not match the matrix shape.
    """
    x = _as_matrix(x)
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (x.n_rows,):
        raise DimensionMismatchError(f"u has shape {u.shape}, expected ({x.n_rows},)")
    return float(u @ x.times(v))


def _side_graph(g, size, label):
    if g is None:
        return PriorGraph.empty(size)
    if g.n_vertices != size:
        raise DimensionMismatchError(
            f"{label} graph has {g.n_vertices} vertices but the matrix side has {size}")
    return g


def fit_rank_one(x, g_rows=None, g_cols=None, cfg=None):
    """
    Fits one sparse graph-regularized rank-one factor.

    :param x: DenseMatrix (or 2-D array) of shape n x p.
    :param g_rows: Prior graph over the n rows, or None for no row prior.
    :param g_cols: Prior graph over the p columns, or None for no column prior.
    :param cfg: SolverConfig; defaults to an unsmoothed L0-sgSVD* fit that keeps every coordinate.
    :return: (FactorTriple, IterationTrace). Running out of iterations is reported through
        `IterationTrace.converged`, not raised.
    :raises DimensionMismatchError: If a graph does not match the matrix.
    :raises ConfigError: If k_u > n or k_v > p.
    :raises DegenerateUpdateError: If an update collapses to zero.
    """
    x = _as_matrix(x)
    n, p = x.shape
    cfg = cfg if cfg is not None else SolverConfig(k_u=n, k_v=p)
    g_rows = _side_graph(g_rows, n, "row")
    g_cols = _side_graph(g_cols, p, "column")
    cfg.check_dimensions(n, p)

    u_rule = update_rule_for(cfg, "u")
    v_rule = update_rule_for(cfg, "v")

    logger.info("fitting %s on a %d x %d matrix (row edges %d, column edges %d)",
                cfg.variant.value, n, p, g_rows.n_edges, g_cols.n_edges)

    v = init_v(x, cfg.init, cfg.seed)
    u = np.zeros(n)
    d_history = []
    converged = False
    for iteration in range(1, cfg.max_iter + 1):
        u = u_rule.apply(x.times(v), g_rows, u)
        z = x.transpose_times(u)
        v = v_rule.apply(z, g_cols, v)
        d = float(z @ v)
        d_history.append(d)
        if len(d_history) >= 2:
            change = abs(d - d_history[-2])
            logger.debug("iteration %d: d = %.12g, |change| = %.3g", iteration, d, change)
            if change < cfg.epsilon:
                converged = True
                break
        else:
            logger.debug("iteration %d: d = %.12g", iteration, d)

    if not converged:
        logger.warning("%s did not converge within %d iterations (last d = %.12g)",
                       cfg.variant.value, cfg.max_iter, d_history[-1])

    d = d_history[-1]
    if d < 0 and cfg.variant is Variant.SGSVD_CLASSIC:
        v, d = -v, -d
    trace = IterationTrace(d_history=tuple(d_history), iterations=len(d_history), converged=converged)
    logger.info("%s finished after %d iterations: d = %.12g, |u|_0 = %d, |v|_0 = %d",
                cfg.variant.value, trace.iterations, d, np.count_nonzero(u), np.count_nonzero(v))
    return FactorTriple(u=u, v=v, d=max(d, 0.0)), trace
