import unittest

from sgsvd.config import DenominatorMode, InitMode, SolverConfig, SweepOrder, Variant
from sgsvd.errors import ConfigError, SgsvdError
from sgsvd.graph import LaplacianMode


class SolverConfigTest(unittest.TestCase):
    """
    Test suite for SolverConfig validation and serialization.
    """

    def setUp(self):
        self.cfg = SolverConfig(variant=Variant.SGSVD_CLASSIC, k_u=5, lambda_v=0.2, sigma_u=0.4,
                                denominator_mode=DenominatorMode.EXACT_KKT, eta=2.0,
                                laplacian_mode=LaplacianMode.NORMALIZED, sweep=SweepOrder.JACOBI,
                                init=InitMode.SEEDED_RANDOM, seed=17)

    def test_defaults(self):
        """
        Tests the documented defaults.
        """
        cfg = SolverConfig(k_u=1, k_v=1)
        self.assertIs(cfg.variant, Variant.L0_SGSVD_STAR)
        self.assertIs(cfg.denominator_mode, DenominatorMode.ALGORITHM_PSEUDOCODE)
        self.assertIs(cfg.laplacian_mode, LaplacianMode.RAW)
        self.assertIs(cfg.sweep, SweepOrder.GAUSS_SEIDEL)
        self.assertIs(cfg.init, InitMode.POWER_ITERATION)
        self.assertEqual((cfg.epsilon, cfg.max_iter, cfg.eta), (1e-6, 1000, 1.0))

    def test_validation(self):
        """
        Tests that out-of-range values raise ConfigError, which is also a ValueError.
        """
        for bad in ({"k_u": 0}, {"k_v": 2.5}, {"lambda_u": -0.1}, {"sigma_v": float("inf")}, {"eta": -1},
                    {"epsilon": 0.0}, {"max_iter": 0}, {"variant": "l0svd"}, {"seed": 1.5}):
            with self.assertRaises(ConfigError):
                SolverConfig(**{"k_u": 1, "k_v": 1, **bad})
        self.assertTrue(issubclass(ConfigError, ValueError))
        self.assertTrue(issubclass(ConfigError, SgsvdError))

    def test_top_k_variants_need_both_cardinalities(self):
        """
        Tests that L0-sgSVD* and L0SVD reject a missing k_u or k_v while the other variants accept it.
        """
        for variant in (Variant.L0_SGSVD_STAR, Variant.L0SVD):
            for partial in ({}, {"k_u": 3}, {"k_v": 3}):
                with self.assertRaises(ConfigError):
                    SolverConfig(variant=variant, **partial)
        SolverConfig(variant=Variant.L1_SGSVD_STAR)
        SolverConfig(variant=Variant.SGSVD_CLASSIC, lambda_u=0.1, lambda_v=0.1)

    def test_check_dimensions(self):
        """
        Tests that cardinalities are checked against the matrix except for the L1 variant.
        """
        SolverConfig(k_u=3, k_v=4).check_dimensions(3, 4)
        with self.assertRaises(ConfigError):
            SolverConfig(k_u=3, k_v=5).check_dimensions(3, 4)
        SolverConfig(variant=Variant.L1_SGSVD_STAR, k_u=10).check_dimensions(3, 4)

    def test_effective_sigma(self):
        """
        Tests that L0SVD ignores the smoothing weights.
        """
        self.assertEqual(SolverConfig(variant=Variant.L0SVD, k_u=1, k_v=1, sigma_u=0.3).effective_sigma_u(), 0.0)
        self.assertEqual(SolverConfig(k_u=1, k_v=1, sigma_v=0.3).effective_sigma_v(), 0.3)
        self.assertFalse(self.cfg.is_starred)
        self.assertTrue(SolverConfig(variant=Variant.L1_SGSVD_STAR).is_l1)

    def test_dict_round_trip(self):
        """
        Tests to_dict / from_dict and the rejection of unknown keys and enum values.
        """
        data = self.cfg.to_dict()
        self.assertEqual(data["variant"], "sgsvd")
        self.assertEqual(data["laplacian_mode"], "normalized")
        self.assertEqual(SolverConfig.from_dict(data), self.cfg)
        with self.assertRaises(ConfigError):
            SolverConfig.from_dict({"bogus": 1})
        with self.assertRaises(ConfigError):
            SolverConfig.from_dict({"sweep": "diagonal"})

    def test_with_changes(self):
        changed = self.cfg.with_changes(k_u=7)
        self.assertEqual(changed.k_u, 7)
        self.assertEqual(self.cfg.k_u, 5)
        with self.assertRaises(ConfigError):
            self.cfg.with_changes(max_iter=-1)


if __name__ == '__main__':
    unittest.main()
