"""
This module runs the support-recovery comparison at desk scale: for every noise level and seed,
simulate a dataset, fit each method with the planted sparsity, and average sensitivity and
specificity per (gamma, method).

Recovery fits run Jacobi sweeps with undivided coordinate updates, so every neighbour sum reads the
previous unit-norm iterate.

Classes:
    - RecoveryRow: Mean recovery metrics of one method at one noise level.
"""

import logging
from dataclasses import dataclass

import numpy as np

from sgsvd.config import DenominatorMode, SolverConfig, SweepOrder, Variant
from sgsvd.solver import fit_rank_one
from sgbench.evaluate import support_metrics
from sgbench.simulate import gen_dataset

logger = logging.getLogger(__name__)

DEFAULT_METHODS = (Variant.L0_SGSVD_STAR, Variant.SGSVD_CLASSIC, Variant.L0SVD)
RECOVERY_DENOMINATOR = DenominatorMode.ALGORITHM_PSEUDOCODE
RECOVERY_SWEEP = SweepOrder.JACOBI


@dataclass(frozen=True)
class RecoveryRow:
    """
    Attributes:
        gamma (float): Noise scale.
        method (Variant): Solver variant.
        replicates (int): Number of seeds averaged.
        u_sensitivity (float)
        u_specificity (float)
        v_sensitivity (float)
        v_specificity (float)
    """

    gamma: float
    method: Variant
    replicates: int
    u_sensitivity: float
    u_specificity: float
    v_sensitivity: float
    v_specificity: float


def recovery_config(method, spec, sigma, denominator_mode=RECOVERY_DENOMINATOR, sweep=RECOVERY_SWEEP,
                    **overrides):
    """
    Returns the configuration used for one method: cardinalities matched to the planted supports
    and the same sigma on both sides.
    """
    return SolverConfig(variant=method, k_u=spec.support_u, k_v=spec.support_v, sigma_u=sigma,
                        sigma_v=sigma, denominator_mode=denominator_mode, sweep=sweep, **overrides)


def recovery_metrics(spec, method, sigma, denominator_mode=RECOVERY_DENOMINATOR, sweep=RECOVERY_SWEEP):
    """
    Simulates one dataset and returns the (u, v) SupportMetrics of one method on it.
    """
    matrix, truth, row_graph, col_graph = gen_dataset(spec)
    cfg = recovery_config(method, spec, sigma, denominator_mode, sweep)
    factor, _ = fit_rank_one(matrix, row_graph, col_graph, cfg)
    return (support_metrics(factor.u, truth.support_u_idx),
            support_metrics(factor.v, truth.support_v_idx))


def run_recovery_benchmark(spec_template, gammas, seeds, methods=DEFAULT_METHODS, sigma=0.1,
                           denominator_mode=RECOVERY_DENOMINATOR, sweep=RECOVERY_SWEEP):
    """
    Runs every method on every (gamma, seed) dataset.

    :param spec_template: SimSpec whose gamma and seed are overridden per run.
    :param gammas: Noise scales.
    :param seeds: Seeds; each gives one replicate per gamma.
    :param methods: Variants to compare.
    :param sigma: Smoothing weight on both sides.
    :param denominator_mode: Denominator mode of every fit.
    :param sweep: Sweep order of every fit.
    :return: One RecoveryRow per (gamma, method), gammas outermost.
    """
    seeds = list(seeds)
    rows = []
    for gamma in gammas:
        collected = {method: [] for method in methods}
        for seed in seeds:
            spec = spec_template.with_changes(gamma=gamma, seed=seed)
            for method in methods:
                u_metrics, v_metrics = recovery_metrics(spec, method, sigma, denominator_mode, sweep)
                collected[method].append((u_metrics.sensitivity, u_metrics.specificity,
                                          v_metrics.sensitivity, v_metrics.specificity))
        for method in methods:
            means = np.mean(np.array(collected[method]), axis=0)
            rows.append(RecoveryRow(gamma, method, len(seeds), *(float(m) for m in means)))
            logger.info("gamma %.4g %s: v sensitivity %.4f", gamma, method.value, rows[-1].v_sensitivity)
    return rows
