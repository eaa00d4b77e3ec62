"""
Command-line front end. Sub-commands:

    simulate   write a synthetic dataset (matrix, two graphs, truth, manifest)
    fit        extract K factors from a matrix with optional row/column prior graphs
    evaluate   score a factors file against truth and/or prior graphs
    benchmark  compare support recovery of several variants over a gamma grid
    replay     re-run the command recorded in a manifest

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numeric/degenerate error.
"""

import argparse
import logging
import sys
from enum import IntEnum
from pathlib import Path

import numpy as np

from sgsvd import __version__
from sgsvd.config import DenominatorMode, InitMode, SolverConfig, SweepOrder, Variant
from sgsvd.deflation import fit_rank_k
from sgsvd.errors import (ConfigError, DegenerateUpdateError, DimensionMismatchError, FormatError,
                          GraphError)
from sgsvd.graph import LaplacianMode
from sgbench import formats
from sgbench.benchmark import DEFAULT_METHODS, RECOVERY_DENOMINATOR, RECOVERY_SWEEP, run_recovery_benchmark
from sgbench.evaluate import (DEFAULT_PERMUTATIONS, SIGNIFICANCE_LEVELS, edge_enrichment,
                              enrichment_fractions, module_correlation_excess, support_metrics)
from sgbench.simulate import SignMode, SimSpec, gamma_grid, gen_dataset, make_rng

logger = logging.getLogger(__name__)

TOOL_NAME = "pysgsvd"

MATRIX_FILE = "matrix.tsv"
ROW_GRAPH_FILE = "rows.graph.tsv"
COL_GRAPH_FILE = "cols.graph.tsv"
TRUTH_FILE = "truth.tsv"
MANIFEST_FILE = "manifest.json"
FACTORS_FILE = "factors.tsv"
TRACES_FILE = "traces.tsv"
REPORT_FILE = "report.tsv"
BENCHMARK_FILE = "benchmark.tsv"


class ExitCode(IntEnum):
    OK = 0
    USAGE = 2
    IO = 3
    NUMERIC = 4


def build_parser():
    """
    Returns the argparse parser for every sub-command.
    """
    parser = argparse.ArgumentParser(prog="sgsvd", description="Sparse graph-regularized SVD toolkit")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="write a synthetic dataset")
    _add_sim_arguments(simulate)
    simulate.add_argument("--gamma", type=float, default=0.06, help="noise scale")
    simulate.add_argument("--gamma-sweep", type=float, nargs=3, metavar=("START", "STOP", "STEP"),
                          help="write one sub-directory per gamma on an inclusive grid")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", required=True, help="output directory")

    fit = commands.add_parser("fit", help="extract factors from a matrix")
    fit.add_argument("--matrix", required=True)
    fit.add_argument("--row-graph", help="prior graph over rows (absent: no row smoothing)")
    fit.add_argument("--col-graph", help="prior graph over columns (absent: no column smoothing)")
    fit.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.L0_SGSVD_STAR.value)
    fit.add_argument("--ku", type=int, help="nonzeros kept in u")
    fit.add_argument("--kv", type=int, help="nonzeros kept in v")
    fit.add_argument("--lambda-u", type=float, help="soft threshold for u")
    fit.add_argument("--lambda-v", type=float, help="soft threshold for v")
    fit.add_argument("--sigma-u", type=float, default=0.0)
    fit.add_argument("--sigma-v", type=float, default=0.0)
    fit.add_argument("--rank", type=int, default=1, help="number of factors to extract")
    fit.add_argument("--epsilon", type=float, default=1e-6)
    fit.add_argument("--max-iter", type=int, default=1000)
    fit.add_argument("--normalized-laplacian", action="store_true")
    fit.add_argument("--denominator", choices=[m.value for m in DenominatorMode],
                     default=DenominatorMode.ALGORITHM_PSEUDOCODE.value)
    fit.add_argument("--eta", type=float, default=1.0, help="ridge multiplier for --denominator exact")
    fit.add_argument("--sweep", choices=[s.value for s in SweepOrder], default=SweepOrder.GAUSS_SEIDEL.value)
    fit.add_argument("--init", choices=[i.value for i in InitMode], default=InitMode.POWER_ITERATION.value)
    fit.add_argument("--seed", type=int, default=0, help="seed for --init random")
    fit.add_argument("--out", required=True, help="output directory")

    evaluate = commands.add_parser("evaluate", help="score a factors file")
    evaluate.add_argument("--factors", required=True)
    evaluate.add_argument("--truth")
    evaluate.add_argument("--row-graph")
    evaluate.add_argument("--col-graph")
    evaluate.add_argument("--matrix", help="adds the within-module correlation permutation test")
    evaluate.add_argument("--permutations", type=int, default=DEFAULT_PERMUTATIONS)
    evaluate.add_argument("--seed", type=int, default=0)
    evaluate.add_argument("--out", required=True, help="output directory")

    benchmark = commands.add_parser("benchmark", help="support-recovery comparison over a gamma grid")
    _add_sim_arguments(benchmark)
    benchmark.add_argument("--gammas", type=float, nargs=3, metavar=("START", "STOP", "STEP"),
                           default=[0.02, 0.06, 0.005])
    benchmark.add_argument("--seeds", type=int, default=10, help="replicates per gamma")
    benchmark.add_argument("--seed-base", type=int, default=0)
    benchmark.add_argument("--sigma", type=float, default=0.1)
    benchmark.add_argument("--methods", nargs="+", choices=[v.value for v in Variant],
                           default=[v.value for v in DEFAULT_METHODS])
    benchmark.add_argument("--denominator", choices=[m.value for m in DenominatorMode],
                           default=RECOVERY_DENOMINATOR.value)
    benchmark.add_argument("--sweep", choices=[s.value for s in SweepOrder], default=RECOVERY_SWEEP.value)
    benchmark.add_argument("--out", required=True, help="output directory")

    replay = commands.add_parser("replay", help="re-run the command recorded in a manifest")
    replay.add_argument("--manifest", required=True)
    replay.add_argument("--out", help="write to this directory instead of the recorded one")
    return parser


def _add_sim_arguments(parser):
    parser.add_argument("--n", type=int, default=100, help="rows")
    parser.add_argument("--p", type=int, default=100, help="columns")
    parser.add_argument("--support", type=int, default=50, help="nonzeros of both planted vectors")
    parser.add_argument("--support-u", type=int, help="overrides --support for u")
    parser.add_argument("--support-v", type=int, help="overrides --support for v")
    parser.add_argument("--p11", type=float, default=0.3, help="edge probability inside the support block")
    parser.add_argument("--p12", type=float, default=0.1, help="edge probability elsewhere")
    parser.add_argument("--same-sign", action="store_true", help="plant u = |u| and v = -|v|")


def _sim_spec(args, gamma, seed):
    return SimSpec(n=args.n, p=args.p,
                   support_u=args.support_u if args.support_u is not None else args.support,
                   support_v=args.support_v if args.support_v is not None else args.support,
                   gamma=gamma, sign_mode=SignMode.SAME_SIGN if args.same_sign else SignMode.MIXED,
                   p11=args.p11, p12=args.p12, seed=seed)


def _manifest(command, argv, config, seed, inputs, outputs):
    return {"tool": TOOL_NAME, "version": __version__, "command": command, "argv": list(argv),
            "config": config, "seed": seed, "inputs": inputs, "outputs": outputs}


def _output_dir(path):
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_dataset(out, spec, argv):
    matrix, truth, row_graph, col_graph = gen_dataset(spec)
    outputs = {"matrix": str(out / MATRIX_FILE), "row_graph": str(out / ROW_GRAPH_FILE),
               "col_graph": str(out / COL_GRAPH_FILE), "truth": str(out / TRUTH_FILE)}
    formats.write_matrix(outputs["matrix"], matrix)
    formats.write_graph(outputs["row_graph"], row_graph)
    formats.write_graph(outputs["col_graph"], col_graph)
    formats.write_truth(outputs["truth"], truth)
    formats.write_manifest(out / MANIFEST_FILE,
                           _manifest("simulate", argv, spec.to_dict(), spec.seed, {}, outputs))
    logger.info("wrote dataset (gamma %.4g, seed %d) to %s", spec.gamma, spec.seed, out)
    return list(outputs.values()) + [str(out / MANIFEST_FILE)]


def cmd_simulate(args, argv):
    """
    Writes one dataset, or one per gamma under `gamma_<value>/` with --gamma-sweep.
    """
    if args.gamma_sweep is None:
        spec = _sim_spec(args, args.gamma, args.seed)
        return _write_dataset(_output_dir(args.out), spec, argv)

    gammas = gamma_grid(*args.gamma_sweep)
    specs = [_sim_spec(args, gamma, args.seed) for gamma in gammas]
    out = _output_dir(args.out)
    written = []
    for gamma, spec in zip(gammas, specs):
        written.extend(_write_dataset(_output_dir(out / f"gamma_{gamma:.3f}"), spec, argv))
    formats.write_manifest(out / MANIFEST_FILE, _manifest(
        "simulate", argv, {"gammas": gammas, **specs[0].to_dict()},
        args.seed, {}, {"datasets": [str(out / f"gamma_{g:.3f}") for g in gammas]}))
    return written + [str(out / MANIFEST_FILE)]


def _solver_config(args):
    variant = Variant(args.variant)
    if variant is Variant.L1_SGSVD_STAR and (args.ku is not None or args.kv is not None):
        raise ConfigError("--ku/--kv do not apply to l1-sgsvd-star; use --lambda-u/--lambda-v")
    if variant in (Variant.L0_SGSVD_STAR, Variant.L0SVD) and (
            args.lambda_u is not None or args.lambda_v is not None):
        raise ConfigError(f"--lambda-u/--lambda-v do not apply to {variant.value}; use --ku/--kv")
    if variant is Variant.SGSVD_CLASSIC:
        for side, k, lam in (("u", args.ku, args.lambda_u), ("v", args.kv, args.lambda_v)):
            if k is not None and lam is not None:
                raise ConfigError(f"--k{side} and --lambda-{side} are exclusive for sgsvd")
    return SolverConfig(
        variant=variant, k_u=args.ku, k_v=args.kv,
        lambda_u=args.lambda_u or 0.0, lambda_v=args.lambda_v or 0.0,
        sigma_u=args.sigma_u, sigma_v=args.sigma_v, eta=args.eta,
        denominator_mode=DenominatorMode(args.denominator),
        laplacian_mode=LaplacianMode.NORMALIZED if args.normalized_laplacian else LaplacianMode.RAW,
        sweep=SweepOrder(args.sweep), epsilon=args.epsilon, max_iter=args.max_iter,
        init=InitMode(args.init), seed=args.seed)


def cmd_fit(args, argv):
    """
    Fits `--rank` factors and writes factors, traces and manifest.
    """
    cfg = _solver_config(args)
    if args.rank < 1:
        raise ConfigError(f"--rank must be >= 1, got {args.rank}")
    matrix = formats.read_matrix(args.matrix)
    row_graph = formats.read_graph(args.row_graph) if args.row_graph else None
    col_graph = formats.read_graph(args.col_graph) if args.col_graph else None
    if row_graph is None and cfg.sigma_u > 0:
        logger.info("no row graph given; sigma_u has no effect")
    if col_graph is None and cfg.sigma_v > 0:
        logger.info("no column graph given; sigma_v has no effect")

    series = fit_rank_k(matrix, row_graph, col_graph, cfg, args.rank)
    for index, flag in enumerate(series.converged):
        if not flag:
            logger.warning("factor %d did not converge; it is kept and flagged converged=false", index)

    out = _output_dir(args.out)
    outputs = {"factors": str(out / FACTORS_FILE), "traces": str(out / TRACES_FILE)}
    formats.write_factors(outputs["factors"], series.factors, series.converged)
    formats.write_traces(outputs["traces"], series.traces)
    inputs = {"matrix": args.matrix, "row_graph": args.row_graph, "col_graph": args.col_graph}
    formats.write_manifest(out / MANIFEST_FILE, _manifest(
        "fit", argv, {"rank": args.rank, **cfg.to_dict()}, cfg.seed, inputs, outputs))
    logger.info("wrote %d factors to %s", len(series), out)
    return list(outputs.values()) + [str(out / MANIFEST_FILE)]


def _enrichment_cells(prefix, graph, vector, size):
    if graph.n_vertices != size:
        raise DimensionMismatchError(
            f"{prefix} graph has {graph.n_vertices} vertices but factors have length {size}")
    module = np.flatnonzero(vector)
    try:
        result = edge_enrichment(graph, module)
    except ConfigError:
        return {f"{prefix}_module_size": len(module), f"{prefix}_internal_edges": None,
                f"{prefix}_fc": None, f"{prefix}_p_value": None}
    return {f"{prefix}_module_size": result.module_size, f"{prefix}_internal_edges": result.internal_edges,
            f"{prefix}_fc": result.fc, f"{prefix}_p_value": result.p_value}


def cmd_evaluate(args, argv):
    """
    Writes a per-factor report with summary rows.
    """
    if not (args.truth or args.row_graph or args.col_graph):
        raise ConfigError("nothing to evaluate: give --truth and/or --row-graph/--col-graph")
    factors, converged = formats.read_factors(args.factors)
    if not factors:
        raise ConfigError(f"{args.factors} holds no factors")
    n, p = len(factors[0].u), len(factors[0].v)
    truth = formats.read_truth(args.truth) if args.truth else None
    if truth is not None and (len(truth.u_true) != n or len(truth.v_true) != p):
        raise DimensionMismatchError(
            f"truth is {len(truth.u_true)} x {len(truth.v_true)} but factors are {n} x {p}")
    row_graph = formats.read_graph(args.row_graph) if args.row_graph else None
    col_graph = formats.read_graph(args.col_graph) if args.col_graph else None
    matrix = formats.read_matrix(args.matrix) if args.matrix else None
    if matrix is not None and matrix.shape != (n, p):
        raise DimensionMismatchError(f"matrix is {matrix.n_rows} x {matrix.n_cols} but factors are {n} x {p}")

    columns = ["factor", "d", "converged"]
    if truth is not None:
        columns += ["u_sensitivity", "u_specificity", "v_sensitivity", "v_specificity"]
    for prefix, graph in (("u", row_graph), ("v", col_graph)):
        if graph is not None:
            columns += [f"{prefix}_module_size", f"{prefix}_internal_edges", f"{prefix}_fc", f"{prefix}_p_value"]
    if matrix is not None:
        columns.append("u_correlation_p_value")

    rng = make_rng(args.seed)
    rows = []
    for index, (factor, flag) in enumerate(zip(factors, converged)):
        row = {"factor": index, "d": factor.d, "converged": flag}
        if truth is not None:
            u_metrics = support_metrics(factor.u, truth.support_u_idx)
            v_metrics = support_metrics(factor.v, truth.support_v_idx)
            row.update(u_sensitivity=u_metrics.sensitivity, u_specificity=u_metrics.specificity,
                       v_sensitivity=v_metrics.sensitivity, v_specificity=v_metrics.specificity)
        if row_graph is not None:
            row.update(_enrichment_cells("u", row_graph, factor.u, n))
        if col_graph is not None:
            row.update(_enrichment_cells("v", col_graph, factor.v, p))
        if matrix is not None:
            module = np.flatnonzero(factor.u)
            row["u_correlation_p_value"] = (module_correlation_excess(matrix, module, args.permutations, rng)
                                            if len(module) >= 2 else None)
        rows.append(row)

    summary = {}
    for column in columns[3:]:
        if column.endswith(("_module_size", "_internal_edges")):
            continue
        values = [row[column] for row in rows if row.get(column) is not None]
        summary[f"mean_{column}"] = float(np.mean(values)) if values else None
    for prefix, graph in (("u", row_graph), ("v", col_graph)):
        if graph is not None:
            p_values = [row[f"{prefix}_p_value"] for row in rows if row[f"{prefix}_p_value"] is not None]
            for level, fraction in enrichment_fractions(p_values, SIGNIFICANCE_LEVELS).items():
                summary[f"{prefix}_fraction_enriched_{level:g}"] = fraction

    out = _output_dir(args.out)
    report = str(out / REPORT_FILE)
    formats.write_report(report, columns, rows, summary)
    inputs = {"factors": args.factors, "truth": args.truth, "row_graph": args.row_graph,
              "col_graph": args.col_graph, "matrix": args.matrix}
    formats.write_manifest(out / MANIFEST_FILE, _manifest(
        "evaluate", argv, {"permutations": args.permutations}, args.seed, inputs, {"report": report}))
    logger.info("wrote report for %d factors to %s", len(rows), report)
    return [report, str(out / MANIFEST_FILE)]


def cmd_benchmark(args, argv):
    """
    Writes mean recovery metrics per (gamma, method).
    """
    template = _sim_spec(args, 0.0, args.seed_base)
    gammas = gamma_grid(*args.gammas)
    if args.seeds < 1:
        raise ConfigError(f"--seeds must be >= 1, got {args.seeds}")
    methods = [Variant(name) for name in args.methods]
    if Variant.L1_SGSVD_STAR in methods:
        raise ConfigError("the recovery benchmark matches cardinalities; l1-sgsvd-star has none")
    rows = run_recovery_benchmark(template, gammas, range(args.seed_base, args.seed_base + args.seeds),
                                  methods, args.sigma, DenominatorMode(args.denominator),
                                  SweepOrder(args.sweep))

    out = _output_dir(args.out)
    path = str(out / BENCHMARK_FILE)
    columns = ["gamma", "method", "replicates", "u_sensitivity", "u_specificity",
               "v_sensitivity", "v_specificity"]
    lines = ["\t".join(columns)]
    for row in rows:
        lines.append("\t".join([formats.format_real(row.gamma), row.method.value, str(row.replicates),
                                formats.format_real(row.u_sensitivity), formats.format_real(row.u_specificity),
                                formats.format_real(row.v_sensitivity), formats.format_real(row.v_specificity)]))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
    config = {"gammas": gammas, "seeds": args.seeds, "sigma": args.sigma, "methods": args.methods,
              "denominator": args.denominator, "sweep": args.sweep, **template.to_dict()}
    formats.write_manifest(out / MANIFEST_FILE, _manifest(
        "benchmark", argv, config, args.seed_base, {}, {"benchmark": path}))
    return [path, str(out / MANIFEST_FILE)]


def cmd_replay(args, argv):
    """
    Re-runs the argv recorded in a manifest, optionally redirecting --out.
    """
    manifest = formats.read_manifest(args.manifest)
    recorded = manifest.get("argv")
    if not isinstance(recorded, list) or not recorded:
        raise FormatError(args.manifest, "manifest has no recorded argv")
    if recorded[0] == "replay":
        raise ConfigError("a replay manifest cannot be replayed")
    recorded = list(recorded)
    if args.out is not None:
        if "--out" not in recorded:
            raise FormatError(args.manifest, "recorded argv has no --out to redirect")
        recorded[recorded.index("--out") + 1] = args.out
    logger.info("replaying: %s", " ".join(recorded))
    try:
        replayed = build_parser().parse_args(recorded)
    except SystemExit:
        raise FormatError(args.manifest, "recorded argv is not a valid command line") from None
    return _dispatch(replayed, recorded)


HANDLERS = {"simulate": cmd_simulate, "fit": cmd_fit, "evaluate": cmd_evaluate,
            "benchmark": cmd_benchmark, "replay": cmd_replay}


def _dispatch(args, argv):
    return HANDLERS[args.command](args, argv)


def _configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr,
                        force=True)


def main(argv=None):
    """
    Runs one command and returns its exit code.

    :param argv: Argument list without the program name; defaults to sys.argv[1:].
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else ExitCode.OK
    _configure_logging(args)
    command_argv = argv[argv.index(args.command):]

    try:
        _dispatch(args, command_argv)
    except (ConfigError, DimensionMismatchError) as exc:
        logger.error("%s", exc)
        return ExitCode.USAGE
    except (FormatError, GraphError, OSError) as exc:
        logger.error("%s", exc)
        return ExitCode.IO
    except DegenerateUpdateError as exc:
        logger.error("%s", exc)
        return ExitCode.NUMERIC
    return ExitCode.OK


if __name__ == "__main__":
    sys.exit(main())
