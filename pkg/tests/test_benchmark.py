"""
Statistical checks on simulated data: support-recovery ordering of the variants, planted-module enrichment
and the cost of one iteration as the problem grows. These run for a minute or two.
"""

import time
import unittest

import numpy as np
from scipy.stats import ttest_rel

from sgsvd.config import DenominatorMode, SolverConfig, SweepOrder, Variant
from sgsvd.solver import fit_rank_one
from sgbench.benchmark import RecoveryRow, recovery_config, recovery_metrics, run_recovery_benchmark
from sgbench.evaluate import edge_enrichment
from sgbench.simulate import SignMode, SimSpec, gen_dataset

SIGMA = 0.1


def _mean_sensitivities(spec, seeds):
    """
    Returns {variant: array of per-seed sensitivities averaged over u and v}.
    """
    out = {}
    for method in (Variant.L0_SGSVD_STAR, Variant.SGSVD_CLASSIC, Variant.L0SVD):
        values = []
        for seed in seeds:
            u_metrics, v_metrics = recovery_metrics(spec.with_changes(seed=seed), method, SIGMA)
            values.append(0.5 * (u_metrics.sensitivity + v_metrics.sensitivity))
        out[method] = np.array(values)
    return out


class RecoveryOrderingTest(unittest.TestCase):
    """
    Test suite comparing the starred, classic and graph-free solvers on simulated data.
    """

    def test_mixed_signs_favour_absolute_smoothing(self):
        """
        Tests that with mixed signs at gamma = 0.06 the starred variant beats both others in mean
        sensitivity over 50 seeds, each by a one-sided paired t-test at p < 0.05.
        """
        results = _mean_sensitivities(SimSpec(gamma=0.06), range(50))
        star = results[Variant.L0_SGSVD_STAR]
        for other in (Variant.SGSVD_CLASSIC, Variant.L0SVD):
            self.assertGreater(star.mean(), results[other].mean())
            statistic, p_two_sided = ttest_rel(star, results[other])
            self.assertGreater(statistic, 0)
            self.assertLess(p_two_sided / 2, 0.05)

    def test_same_signs_starred_and_classic_agree(self):
        """
        Tests that with same-sign vectors the starred and classic variants recover supports about equally
        well over 50 seeds and both beat the graph-free solver.
        """
        results = _mean_sensitivities(SimSpec(gamma=0.06, sign_mode=SignMode.SAME_SIGN), range(50))
        star = results[Variant.L0_SGSVD_STAR].mean()
        classic = results[Variant.SGSVD_CLASSIC].mean()
        self.assertLess(abs(star - classic), 0.05)
        self.assertGreater(star, results[Variant.L0SVD].mean())
        self.assertGreater(classic, results[Variant.L0SVD].mean())

    def test_run_recovery_benchmark(self):
        """
        Tests the shape of the benchmark table on a small grid.
        """
        rows = run_recovery_benchmark(SimSpec(n=30, p=30, support_u=10, support_v=10), [0.02, 0.04], range(3))
        self.assertEqual(len(rows), 6)
        self.assertEqual([row.gamma for row in rows[:3]], [0.02] * 3)
        for row in rows:
            self.assertIsInstance(row, RecoveryRow)
            self.assertEqual(row.replicates, 3)
            for value in (row.u_sensitivity, row.u_specificity, row.v_sensitivity, row.v_specificity):
                self.assertTrue(0.0 <= value <= 1.0)

    def test_recovery_config(self):
        cfg = recovery_config(Variant.SGSVD_CLASSIC, SimSpec(support_u=20, support_v=30), 0.2)
        self.assertEqual((cfg.k_u, cfg.k_v, cfg.sigma_u, cfg.sigma_v), (20, 30, 0.2, 0.2))
        self.assertIs(cfg.denominator_mode, DenominatorMode.ALGORITHM_PSEUDOCODE)
        self.assertIs(cfg.sweep, SweepOrder.JACOBI)


class PlantedEnrichmentTest(unittest.TestCase):
    """
    Test suite for edge enrichment of fitted modules.
    """

    def test_fitted_modules_are_enriched(self):
        """
        Tests that row modules fitted at gamma = 0.04 are enriched in the planted graph (FC > 1, p < 0.05)
        in at least 45 of 50 seeds.
        """
        enriched = 0
        for seed in range(50):
            spec = SimSpec(gamma=0.04, seed=seed)
            matrix, _, row_graph, col_graph = gen_dataset(spec)
            factor, _ = fit_rank_one(matrix, row_graph, col_graph,
                                     recovery_config(Variant.L0_SGSVD_STAR, spec, SIGMA))
            result = edge_enrichment(row_graph, factor.u_support)
            if result.fc > 1 and result.p_value < 0.05:
                enriched += 1
        self.assertGreaterEqual(enriched, 45)


class ScalingTest(unittest.TestCase):
    """
    Test suite for the cost of fit_rank_one on dense data with sparse graphs (mean degree 10).
    """

    def _timed_fit(self, size):
        probability = 10.0 / (size - 1)
        spec = SimSpec(n=size, p=size, support_u=size // 10, support_v=size // 10, gamma=0.005,
                       p11=probability, p12=probability, seed=size)
        matrix, _, row_graph, col_graph = gen_dataset(spec)
        cfg = SolverConfig(k_u=size // 10, k_v=size // 10, sigma_u=0.1, sigma_v=0.1,
                           denominator_mode=DenominatorMode.EXACT_KKT)
        start = time.perf_counter()
        _, trace = fit_rank_one(matrix, row_graph, col_graph, cfg)
        elapsed = time.perf_counter() - start
        self.assertTrue(trace.converged)
        return elapsed, elapsed / trace.iterations

    def test_time_grows_at_most_linearly_in_size(self):
        """
        Tests that a full 1000 x 1000 fit at the default tolerance takes under 10 s and that time per
        iteration grows no faster than n * p (with 2x slack) from 250 x 250 to 1000 x 1000.
        """
        self._timed_fit(250)
        timings = {size: self._timed_fit(size) for size in (250, 500, 1000)}
        self.assertLess(timings[1000][0], 10.0)
        for small, large in ((250, 500), (500, 1000), (250, 1000)):
            ratio = timings[large][1] / timings[small][1]
            self.assertLess(ratio, 2.0 * (large / small) ** 2)


if __name__ == '__main__':
    unittest.main()
