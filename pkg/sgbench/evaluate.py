"""
This module computes the evaluation statistics: support recovery against planted truth, edge
enrichment of a module in a prior graph (Fold-Change score and right-tailed hypergeometric test), and
a permutation test of within-module correlation.

Classes:
    - SupportMetrics: Confusion counts with sensitivity and specificity.
    - ModuleEnrichment: Size, internal edges, Fold-Change and p-value of one module.
"""

import logging
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import gammaln, logsumexp

from sgsvd.errors import ConfigError, DimensionMismatchError, DegenerateUpdateError

logger = logging.getLogger(__name__)

SIGNIFICANCE_LEVELS = (0.10, 0.05, 0.01, 0.005, 0.001)

DEFAULT_PERMUTATIONS = 1000


@dataclass(frozen=True)
class SupportMetrics:
    """
    Support recovery of one estimated vector.

    Attributes:
        sensitivity (float): TP / (TP + FN).
        specificity (float): TN / (TN + FP); 1.0 when there are no negatives.
        true_positives (int)
        false_positives (int)
        true_negatives (int)
        false_negatives (int)
    """

    sensitivity: float
    specificity: float
    true_positives: int
    false_positives: int
    true_negatives: int
    false_negatives: int


@dataclass(frozen=True)
class ModuleEnrichment:
    """
    Edge enrichment of a vertex module.

    Attributes:
        module_size (int): n_i.
        internal_edges (int): m_i, edges with both endpoints in the module.
        fc (float): Fold-Change of module density over graph density.
        p_value (float): Right-tailed hypergeometric p-value of m_i.
    """

    module_size: int
    internal_edges: int
    fc: float
    p_value: float


def support_metrics(estimated, truth_support):
    """
    Compares the nonzero pattern of an estimate with a true support. A coordinate counts as positive
    exactly when its estimate is nonzero.

    :param estimated: Estimated vector.
    :param truth_support: Indices of the true nonzeros.
    :raises ConfigError: If the true support is empty.
    :raises IndexError: If a true index lies outside the vector.
    """
    estimated = np.asarray(estimated, dtype=np.float64)
    truth = np.zeros(len(estimated), dtype=bool)
    index = np.asarray(list(truth_support), dtype=np.int64)
    if index.size == 0:
        raise ConfigError("truth support is empty; sensitivity is undefined")
    if index.min() < 0 or index.max() >= len(estimated):
        raise IndexError("truth support index outside the estimated vector")
    truth[index] = True
    predicted = estimated != 0

    tp = int(np.count_nonzero(predicted & truth))
    fp = int(np.count_nonzero(predicted & ~truth))
    tn = int(np.count_nonzero(~predicted & ~truth))
    fn = int(np.count_nonzero(~predicted & truth))
    specificity = tn / (tn + fp) if tn + fp else 1.0
    return SupportMetrics(tp / (tp + fn), specificity, tp, fp, tn, fn)


def fc_score(n_i, m_i, n_total, m_total):
    """
    Returns FC = (m_i / C(n_i, 2)) / (M / C(N, 2)).

    :raises ConfigError: If n_i < 2, N < 2 or M = 0.
    """
    if n_i < 2:
        raise ConfigError(f"a module needs at least 2 vertices, got {n_i}")
    if n_total < 2:
        raise ConfigError(f"the graph needs at least 2 vertices, got {n_total}")
    if m_total < 1:
        raise ConfigError("the graph has no edges; background density is zero")
    return (m_i / comb(n_i, 2)) / (m_total / comb(n_total, 2))


def _log_comb(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def hypergeom_right_tail(observed, successes, draws, population):
    """
    Returns P(H >= observed) for H ~ Hypergeometric(population, successes, draws), summed in log
    space with log-gamma terms.

    For edge enrichment: population = C(N, 2), successes = M, draws = C(n_i, 2), observed = m_i.

    :raises ConfigError: Unless 0 <= observed <= draws <= population and
        0 <= successes <= population.
    """
    if not (0 <= observed <= draws <= population and 0 <= successes <= population):
        raise ConfigError(
            f"invalid hypergeometric arguments: observed={observed}, successes={successes}, "
            f"draws={draws}, population={population}")
    low = max(0, draws - (population - successes))
    high = min(draws, successes)
    if observed <= low:
        return 1.0
    if observed > high:
        return 0.0
    i = np.arange(observed, high + 1, dtype=np.float64)
    log_terms = (_log_comb(successes, i) + _log_comb(population - successes, draws - i)
                 - _log_comb(population, draws))
    return float(min(1.0, np.exp(logsumexp(log_terms))))


def edge_enrichment(g, module):
    """
    Scores a vertex module against a prior graph, with N = g.n_vertices and M = g.n_edges.

    :param g: PriorGraph.
    :param module: Iterable of vertex indices (duplicates ignored).
    :return: ModuleEnrichment.
    :raises ConfigError: If the module has fewer than 2 vertices or the graph has no edges.
    """
    members = np.unique(np.asarray(list(module), dtype=np.int64))
    n_i = len(members)
    m_i = g.count_internal_edges(members)
    fc = fc_score(n_i, m_i, g.n_vertices, g.n_edges)
    p_value = hypergeom_right_tail(m_i, g.n_edges, comb(n_i, 2), comb(g.n_vertices, 2))
    return ModuleEnrichment(module_size=n_i, internal_edges=m_i, fc=fc, p_value=p_value)


def enrichment_fractions(p_values, levels=SIGNIFICANCE_LEVELS):
    """
    Returns {level: fraction of p-values <= level}. An empty input gives 0.0 at every level.
    """
    p_values = np.asarray(list(p_values), dtype=np.float64)
    if p_values.size == 0:
        return {level: 0.0 for level in levels}
    return {level: float(np.mean(p_values <= level)) for level in levels}


def _abs_correlation_sum(rows):
    corr = np.corrcoef(rows)
    upper = np.triu_indices(len(rows), k=1)
    return float(np.sum(np.abs(corr[upper])))


def module_correlation_excess(x, module_rows, n_permutations=DEFAULT_PERMUTATIONS, rng=None):
    """
    Permutation test of within-module co-expression. The statistic is the sum of absolute Pearson
    correlations over all row pairs of the module; it is compared with the same statistic on
    `n_permutations` random row sets of the same size.

    :param x: DenseMatrix.
    :param module_rows: Row indices of the module (at least 2 distinct rows).
    :param n_permutations: Number of random row sets, >= 1.
    :param rng: numpy Generator; a fresh `default_rng(0)` when None.
    :return: (1 + #{random >= observed}) / (n_permutations + 1).
    :raises ConfigError: If the module has fewer than 2 rows or n_permutations < 1.
    :raises DegenerateUpdateError: If a row of X is constant (correlation undefined).
    """
    values = x.values
    members = np.unique(np.asarray(list(module_rows), dtype=np.int64))
    if len(members) < 2:
        raise ConfigError(f"a module needs at least 2 rows, got {len(members)}")
    if n_permutations < 1:
        raise ConfigError(f"n_permutations must be >= 1, got {n_permutations}")
    if members.min() < 0 or members.max() >= x.n_rows:
        raise DimensionMismatchError("module row index outside the matrix")
    constant = np.flatnonzero(np.ptp(values, axis=1) == 0)
    if constant.size:
        raise DegenerateUpdateError(f"row {int(constant[0])} is constant; correlation is undefined")
    rng = rng if rng is not None else np.random.default_rng(0)

    observed = _abs_correlation_sum(values[members])
    exceed = 0
    for _ in range(n_permutations):
        sample = rng.choice(x.n_rows, size=len(members), replace=False)
        if _abs_correlation_sum(values[sample]) >= observed:
            exceed += 1
    p_value = (exceed + 1) / (n_permutations + 1)
    logger.debug("module of %d rows: statistic %.6g, permutation p = %.4g", len(members), observed, p_value)
    return p_value
