import os
import tempfile
import unittest

import numpy as np

from sgbench import formats
from sgbench.cli import ExitCode, main


def _read_bytes(path):
    with open(path, "rb") as handle:
        return handle.read()


class CommandLineTest(unittest.TestCase):
    """
    Test suite for the sgsvd command line, run in-process through main(argv).

    Covers the simulate, fit, evaluate, benchmark and replay commands, their output files, determinism and
    the documented exit codes.
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, *parts):
        return os.path.join(self.dir, *parts)

    def simulate(self, out, *extra):
        argv = ["-q", "simulate", "--n", "40", "--p", "30", "--support-u", "10", "--support-v", "8",
                "--p11", "0.3", "--p12", "0.1", "--seed", "7", "--out", self.path(out)] + list(extra)
        self.assertEqual(main(argv), ExitCode.OK)
        return self.path(out)

    def fit(self, data, out, *extra):
        argv = ["-q", "fit", "--matrix", os.path.join(data, "matrix.tsv"),
                "--row-graph", os.path.join(data, "rows.graph.tsv"),
                "--col-graph", os.path.join(data, "cols.graph.tsv"), "--out", self.path(out)] + list(extra)
        return main(argv)

    def test_simulate_writes_five_files(self):
        """
        Tests the published parameter set and that repeating it gives byte-identical files.
        """
        argv = ["-q", "simulate", "--n", "100", "--p", "100", "--support", "50", "--gamma", "0.06", "--p11", "0.3",
                "--p12", "0.1", "--seed", "7"]
        self.assertEqual(main(argv + ["--out", self.path("a")]), ExitCode.OK)
        self.assertEqual(main(argv + ["--out", self.path("a2")]), ExitCode.OK)
        names = sorted(os.listdir(self.path("a")))
        self.assertEqual(names, ["cols.graph.tsv", "manifest.json", "matrix.tsv", "rows.graph.tsv", "truth.tsv"])
        for name in names:
            if name != "manifest.json":
                self.assertEqual(_read_bytes(self.path("a", name)), _read_bytes(self.path("a2", name)))
        self.assertEqual(main(argv + ["--out", self.path("a")]), ExitCode.OK)
        first = _read_bytes(self.path("a", "manifest.json"))
        self.assertEqual(main(argv + ["--out", self.path("a")]), ExitCode.OK)
        self.assertEqual(_read_bytes(self.path("a", "manifest.json")), first)

    def test_simulate_usage_errors(self):
        """
        Tests that an impossible support and an unknown flag are usage errors and that a rejected
        parameter set leaves no output directory behind.
        """
        self.assertEqual(main(["-q", "simulate", "--support", "200", "--n", "100", "--out", self.path("x")]),
                         ExitCode.USAGE)
        self.assertFalse(os.path.exists(self.path("x")))
        self.assertEqual(main(["-q", "simulate", "--support", "200", "--n", "100", "--gamma-sweep", "0.02", "0.04",
                               "0.01", "--out", self.path("y")]), ExitCode.USAGE)
        self.assertFalse(os.path.exists(self.path("y")))
        self.assertEqual(main(["-q", "simulate", "--bogus", "--out", self.path("x")]), ExitCode.USAGE)
        self.assertEqual(main([]), ExitCode.USAGE)

    def test_simulate_unwritable(self):
        """
        Tests that an output path below a regular file is an I/O error.
        """
        blocker = self.path("file")
        with open(blocker, "w", encoding="utf-8") as handle:
            handle.write("x")
        self.assertEqual(main(["-q", "simulate", "--out", os.path.join(blocker, "sub")]), ExitCode.IO)

    def test_gamma_sweep(self):
        """
        Tests one sub-directory per gamma, each holding a full dataset.
        """
        out = self.simulate("sweep", "--gamma-sweep", "0.02", "0.03", "0.005", "--same-sign")
        self.assertEqual(sorted(d for d in os.listdir(out) if d.startswith("gamma_")),
                         ["gamma_0.020", "gamma_0.025", "gamma_0.030"])
        truth = formats.read_truth(os.path.join(out, "gamma_0.025", "truth.tsv"))
        self.assertTrue(np.all(truth.u_true >= 0))
        self.assertTrue(np.all(truth.v_true <= 0))
        manifest = formats.read_manifest(os.path.join(out, "gamma_0.030", "manifest.json"))
        self.assertEqual(manifest["config"]["gamma"], 0.03)

    def test_fit_noiseless_recovers_truth(self):
        """
        Tests that fitting noiseless data with matched cardinalities recovers the planted supports, and that
        evaluating the result reports perfect recovery.
        """
        data = self.simulate("clean", "--gamma", "0")
        self.assertEqual(self.fit(data, "fit", "--ku", "10", "--kv", "8", "--sigma-u", "0.01", "--sigma-v", "0.01"),
                         ExitCode.OK)
        factors, converged = formats.read_factors(self.path("fit", "factors.tsv"))
        truth = formats.read_truth(os.path.join(data, "truth.tsv"))
        self.assertEqual(len(factors), 1)
        self.assertEqual(converged, [True])
        np.testing.assert_array_equal(factors[0].u_support, truth.support_u_idx)
        np.testing.assert_array_equal(factors[0].v_support, truth.support_v_idx)
        traces = formats.read_traces(self.path("fit", "traces.tsv"))
        self.assertEqual(traces[0].iterations, len(traces[0].d_history))

        argv = ["-q", "evaluate", "--factors", self.path("fit", "factors.tsv"), "--truth",
                os.path.join(data, "truth.tsv"), "--out", self.path("eval")]
        self.assertEqual(main(argv), ExitCode.OK)
        _, rows, summary = formats.read_report(self.path("eval", "report.tsv"))
        for column in ("u_sensitivity", "u_specificity", "v_sensitivity", "v_specificity"):
            self.assertEqual(float(rows[0][column]), 1.0)
            self.assertEqual(summary[f"mean_{column}"], 1.0)

    def test_zero_sigma_star_equals_l0svd(self):
        """
        Tests that l0-sgsvd-star with zero smoothing writes the same factors file as l0svd.
        """
        data = self.simulate("data")
        self.fit(data, "star", "--variant", "l0-sgsvd-star", "--ku", "10", "--kv", "8", "--sigma-u", "0",
                 "--sigma-v", "0")
        self.fit(data, "plain", "--variant", "l0svd", "--ku", "10", "--kv", "8")
        self.assertEqual(_read_bytes(self.path("star", "factors.tsv")), _read_bytes(self.path("plain", "factors.tsv")))

    def test_many_factors_on_tall_matrix(self):
        """
        Tests a 40-factor run with row smoothing on a tall matrix.
        """
        argv = ["-q", "simulate", "--n", "200", "--p", "60", "--support-u", "100", "--support-v", "20",
                "--p11", "0.05", "--p12", "0.01", "--out", self.path("tall")]
        self.assertEqual(main(argv), ExitCode.OK)
        code = self.fit(self.path("tall"), "fit40", "--rank", "40", "--ku", "100", "--kv", "20", "--sigma-u", "0.4",
                        "--sigma-v", "0", "--denominator", "exact", "--max-iter", "100")
        self.assertEqual(code, ExitCode.OK)
        factors, converged = formats.read_factors(self.path("fit40", "factors.tsv"))
        self.assertEqual(len(factors), 40)
        self.assertEqual(len(converged), 40)
        self.assertEqual(len(formats.read_traces(self.path("fit40", "traces.tsv"))), 40)

    def test_fit_errors(self):
        """
        Tests the exit codes of bad flag combinations, a graph of the wrong size, a missing file, a
        non-finite matrix entry and a threshold that removes every coordinate.
        """
        data = self.simulate("data")
        self.assertEqual(self.fit(data, "a", "--variant", "l1-sgsvd-star", "--ku", "3"), ExitCode.USAGE)
        self.assertEqual(self.fit(data, "b", "--variant", "l0svd", "--lambda-u", "0.1"), ExitCode.USAGE)
        self.assertEqual(self.fit(data, "c", "--ku", "41", "--kv", "8"), ExitCode.USAGE)
        argv = ["-q", "fit", "--matrix", os.path.join(data, "matrix.tsv"), "--ku", "10", "--kv", "8",
                "--row-graph", os.path.join(data, "cols.graph.tsv"), "--out", self.path("d")]
        self.assertEqual(main(argv), ExitCode.USAGE)
        self.assertEqual(main(["-q", "fit", "--matrix", self.path("missing.tsv"), "--ku", "1", "--kv", "1",
                               "--out", self.path("e")]), ExitCode.IO)
        self.assertEqual(self.fit(data, "f", "--variant", "l1-sgsvd-star", "--lambda-u", "1000"), ExitCode.NUMERIC)
        with open(self.path("nan.tsv"), "w", encoding="utf-8") as handle:
            handle.write("#2\t2\n1\t2\n3\tnan\n")
        self.assertEqual(main(["-q", "fit", "--matrix", self.path("nan.tsv"), "--ku", "1", "--kv", "1",
                               "--out", self.path("g")]), ExitCode.IO)

    def test_fit_cardinality_flags(self):
        """
        Tests that the top-k variants need both --ku and --kv, and that sgsvd takes either --ku or
        --lambda-u for a side but not both.
        """
        data = self.simulate("data")
        for variant in ("l0-sgsvd-star", "l0svd"):
            self.assertEqual(self.fit(data, f"{variant}-none", "--variant", variant), ExitCode.USAGE)
            self.assertEqual(self.fit(data, f"{variant}-ku", "--variant", variant, "--ku", "10"), ExitCode.USAGE)
        self.assertEqual(self.fit(data, "both-u", "--variant", "sgsvd", "--ku", "10", "--lambda-u", "0.1"),
                         ExitCode.USAGE)
        self.assertEqual(self.fit(data, "both-v", "--variant", "sgsvd", "--kv", "8", "--lambda-v", "0.1"),
                         ExitCode.USAGE)
        self.assertFalse(os.path.exists(self.path("both-u")))
        self.assertEqual(self.fit(data, "mixed", "--variant", "sgsvd", "--ku", "10", "--lambda-v", "0.01"),
                         ExitCode.OK)

    def test_non_convergence_is_not_a_failure(self):
        """
        Tests that running out of iterations still exits 0 and flags the factor.
        """
        data = self.simulate("data")
        self.assertEqual(self.fit(data, "short", "--ku", "10", "--kv", "8", "--max-iter", "1"), ExitCode.OK)
        _, converged = formats.read_factors(self.path("short", "factors.tsv"))
        self.assertEqual(converged, [False])

    def test_evaluate_enrichment(self):
        """
        Tests enrichment columns, the significance-level summary and the correlation permutation test.
        """
        data = self.simulate("data", "--gamma", "0.02")
        self.fit(data, "fit", "--ku", "10", "--kv", "8", "--sigma-u", "0.1", "--sigma-v", "0.1",
                 "--denominator", "exact", "--rank", "2")
        argv = ["-q", "evaluate", "--factors", self.path("fit", "factors.tsv"),
                "--row-graph", os.path.join(data, "rows.graph.tsv"),
                "--col-graph", os.path.join(data, "cols.graph.tsv"),
                "--matrix", os.path.join(data, "matrix.tsv"), "--permutations", "50", "--out", self.path("eval")]
        self.assertEqual(main(argv), ExitCode.OK)
        columns, rows, summary = formats.read_report(self.path("eval", "report.tsv"))
        self.assertEqual(len(rows), 2)
        self.assertIn("u_fc", columns)
        self.assertIn("v_p_value", columns)
        self.assertIn("u_correlation_p_value", columns)
        for level in ("0.1", "0.05", "0.01", "0.005", "0.001"):
            self.assertIn(f"u_fraction_enriched_{level}", summary)
            self.assertIn(f"v_fraction_enriched_{level}", summary)
        self.assertGreater(float(rows[0]["u_fc"]), 1.0)

        self.assertEqual(main(argv), ExitCode.OK)
        self.assertEqual(formats.read_report(self.path("eval", "report.tsv")), (columns, rows, summary))

    def test_evaluate_errors(self):
        """
        Tests that evaluating without truth or graphs is a usage error, as is a truth of the wrong size.
        """
        data = self.simulate("data")
        self.fit(data, "fit", "--ku", "10", "--kv", "8")
        factors = self.path("fit", "factors.tsv")
        self.assertEqual(main(["-q", "evaluate", "--factors", factors, "--out", self.path("e")]), ExitCode.USAGE)
        other = self.simulate("other", "--n", "20")
        self.assertEqual(main(["-q", "evaluate", "--factors", factors, "--truth", os.path.join(other, "truth.tsv"),
                               "--out", self.path("e")]), ExitCode.USAGE)

    def test_benchmark(self):
        """
        Tests one row per (gamma, method) in the benchmark table.
        """
        argv = ["-q", "benchmark", "--n", "30", "--p", "30", "--support", "10", "--gammas", "0.02", "0.03", "0.01",
                "--seeds", "2", "--out", self.path("bench")]
        self.assertEqual(main(argv), ExitCode.OK)
        with open(self.path("bench", "benchmark.tsv"), encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        self.assertEqual(lines[0].split("\t")[:3], ["gamma", "method", "replicates"])
        self.assertEqual(len(lines), 1 + 2 * 3)
        config = formats.read_manifest(self.path("bench", "manifest.json"))["config"]
        self.assertEqual((config["sweep"], config["denominator"]), ("jacobi", "pseudocode"))
        self.assertEqual(main(argv[:-2] + ["--methods", "l1-sgsvd-star", "--out", self.path("b2")]),
                         ExitCode.USAGE)

    def test_replay(self):
        """
        Tests that replaying a fit manifest reproduces the factors file byte for byte, and that simulate
        manifests replay too.
        """
        data = self.simulate("data")
        self.fit(data, "fit", "--ku", "10", "--kv", "8", "--sigma-u", "0.1", "--sigma-v", "0.1", "--init", "random",
                 "--seed", "4", "--sweep", "jacobi")
        manifest = formats.read_manifest(self.path("fit", "manifest.json"))
        self.assertEqual(manifest["command"], "fit")
        self.assertEqual(manifest["config"]["sweep"], "jacobi")
        self.assertEqual(manifest["seed"], 4)

        self.assertEqual(main(["-q", "replay", "--manifest", self.path("fit", "manifest.json"),
                               "--out", self.path("again")]), ExitCode.OK)
        self.assertEqual(_read_bytes(self.path("fit", "factors.tsv")), _read_bytes(self.path("again", "factors.tsv")))
        self.assertEqual(_read_bytes(self.path("fit", "traces.tsv")), _read_bytes(self.path("again", "traces.tsv")))

        self.assertEqual(main(["-q", "replay", "--manifest", os.path.join(data, "manifest.json"),
                               "--out", self.path("data2")]), ExitCode.OK)
        self.assertEqual(_read_bytes(os.path.join(data, "matrix.tsv")), _read_bytes(self.path("data2", "matrix.tsv")))

    def test_replay_errors(self):
        """
        Tests a missing manifest and a manifest without a recorded command line.
        """
        self.assertEqual(main(["-q", "replay", "--manifest", self.path("none.json")]), ExitCode.IO)
        broken = self.path("broken.json")
        formats.write_manifest(broken, {"command": "fit"})
        self.assertEqual(main(["-q", "replay", "--manifest", broken]), ExitCode.IO)


if __name__ == '__main__':
    unittest.main()
