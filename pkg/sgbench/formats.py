"""
This module reads and writes the tab-separated file formats used by the command line. Every writer
has a matching reader, and real numbers are printed with 17 significant digits so a write followed by
a read returns the same values bit for bit. Files are UTF-8 with LF line endings.

Formats:
    - matrix:  `#<rows>\\t<cols>`, then one matrix row per line.
    - graph:   `#vertices <N>`, then `i\\tj` per undirected edge (0-based).
    - factors: `#dims <n> <p>`, then per factor `factor <k> d=<value> converged=<bool>` followed
               by sparse `u\\t<index>\\t<value>` and `v\\t<index>\\t<value>` lines.
    - truth:   `#truth <n> <p>`, then sparse `u`/`v` lines as above.
    - traces:  per factor `#trace <k> iterations=<N> converged=<bool>`, then `k\\ti\\td` lines.
    - report:  `# factors` section (header row + one row per factor), `# summary` section
               (`metric\\tvalue`).
    - manifest: JSON with sorted keys.
"""

import json
import logging

import numpy as np

from sgsvd.errors import FormatError
from sgsvd.factor import FactorTriple
from sgsvd.graph import PriorGraph
from sgsvd.matrix import DenseMatrix
from sgsvd.solver import IterationTrace
from sgbench.simulate import GroundTruth

logger = logging.getLogger(__name__)

NOT_AVAILABLE = "NA"


def format_real(value):
    """
    Formats a real number with 17 significant digits.
    """
    return format(float(value), ".17g")


def _format_bool(flag):
    return "true" if flag else "false"


def _parse_bool(text, path, line):
    if text == "true":
        return True
    if text == "false":
        return False
    raise FormatError(path, f"expected true or false, got {text!r}", line)


def _parse_real(text, path, line):
    try:
        return float(text)
    except ValueError:
        raise FormatError(path, f"not a number: {text!r}", line) from None


def _parse_int(text, path, line):
    try:
        return int(text)
    except ValueError:
        raise FormatError(path, f"not an integer: {text!r}", line) from None


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line)
            handle.write("\n")
    logger.debug("wrote %s", path)


def _read_lines(path):
    with open(path, "r", encoding="utf-8") as handle:
        return [line.rstrip("\n").rstrip("\r") for line in handle]


def write_matrix(path, matrix):
    lines = [f"#{matrix.n_rows}\t{matrix.n_cols}"]
    lines.extend("\t".join(format_real(value) for value in row) for row in matrix.values)
    _write_lines(path, lines)


def read_matrix(path):
    """
    Reads a matrix file.

    :raises FormatError: On a missing header, a wrong row count, a ragged row or a non-finite value.
    """
    lines = _read_lines(path)
    if not lines or not lines[0].startswith("#"):
        raise FormatError(path, "missing '#rows cols' header", 1)
    header = lines[0][1:].split()
    if len(header) != 2:
        raise FormatError(path, "header must be '#rows cols'", 1)
    n_rows, n_cols = (_parse_int(text, path, 1) for text in header)
    body = [line for line in lines[1:] if line]
    if len(body) != n_rows:
        raise FormatError(path, f"expected {n_rows} rows, found {len(body)}")
    values = np.empty((n_rows, n_cols))
    for i, line in enumerate(body):
        fields = line.split("\t")
        if len(fields) != n_cols:
            raise FormatError(path, f"expected {n_cols} values, found {len(fields)}", i + 2)
        values[i] = [_parse_real(text, path, i + 2) for text in fields]
        if not np.all(np.isfinite(values[i])):
            raise FormatError(path, "matrix entries must be finite", i + 2)
    return DenseMatrix(values)


def write_graph(path, graph):
    lines = [f"#vertices {graph.n_vertices}"]
    lines.extend(f"{i}\t{j}" for i, j in graph.edges.tolist())
    _write_lines(path, lines)


def read_graph(path):
    """
    Reads a graph file.

    :raises FormatError: On a missing header or a malformed edge line.
    :raises GraphError: On self-loops, duplicates or out-of-range vertices.
    """
    lines = _read_lines(path)
    if not lines or not lines[0].startswith("#vertices"):
        raise FormatError(path, "missing '#vertices N' header", 1)
    parts = lines[0].split()
    if len(parts) != 2:
        raise FormatError(path, "header must be '#vertices N'", 1)
    n_vertices = _parse_int(parts[1], path, 1)
    edges = []
    for number, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError(path, "edge lines must be 'i<TAB>j'", number)
        edges.append((_parse_int(fields[0], path, number), _parse_int(fields[1], path, number)))
    return PriorGraph(n_vertices, edges)


def _sparse_lines(label, vector):
    return [f"{label}\t{index}\t{format_real(vector[index])}" for index in np.flatnonzero(vector)]


def _read_sparse_entry(fields, vectors, path, number):
    if len(fields) != 3 or fields[0] not in ("u", "v"):
        raise FormatError(path, "entry lines must be 'u|v<TAB>index<TAB>value'", number)
    vector = vectors[fields[0]]
    index = _parse_int(fields[1], path, number)
    if not 0 <= index < len(vector):
        raise FormatError(path, f"index {index} outside 0..{len(vector) - 1}", number)
    vector[index] = _parse_real(fields[2], path, number)


def write_factors(path, factors, converged):
    """
    Writes factors with their convergence flags.

    :param factors: Sequence of FactorTriple sharing one shape.
    :param converged: Sequence of booleans, one per factor.
    """
    n = len(factors[0].u) if factors else 0
    p = len(factors[0].v) if factors else 0
    lines = [f"#dims {n} {p}"]
    for k, (factor, flag) in enumerate(zip(factors, converged)):
        lines.append(f"factor {k} d={format_real(factor.d)} converged={_format_bool(flag)}")
        lines.extend(_sparse_lines("u", factor.u))
        lines.extend(_sparse_lines("v", factor.v))
    _write_lines(path, lines)


def read_factors(path):
    """
    Reads a factors file.

    :return: (factors, converged) as two lists.
    :raises FormatError: On malformed content.
    """
    lines = _read_lines(path)
    if not lines or not lines[0].startswith("#dims"):
        raise FormatError(path, "missing '#dims n p' header", 1)
    parts = lines[0].split()
    if len(parts) != 3:
        raise FormatError(path, "header must be '#dims n p'", 1)
    n, p = _parse_int(parts[1], path, 1), _parse_int(parts[2], path, 1)

    records = []
    for number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if line.startswith("factor "):
            parts = line.split()
            if len(parts) != 4 or not parts[2].startswith("d=") or not parts[3].startswith("converged="):
                raise FormatError(path, "factor lines must be 'factor k d=<value> converged=<bool>'", number)
            if _parse_int(parts[1], path, number) != len(records):
                raise FormatError(path, "factor indices must run 0, 1, 2, ...", number)
            records.append({"d": _parse_real(parts[2][2:], path, number),
                            "converged": _parse_bool(parts[3][len("converged="):], path, number),
                            "u": np.zeros(n), "v": np.zeros(p)})
            continue
        if not records:
            raise FormatError(path, "entry before the first factor line", number)
        _read_sparse_entry(line.split("\t"), records[-1], path, number)

    factors = [FactorTriple(u=r["u"], v=r["v"], d=r["d"]) for r in records]
    return factors, [r["converged"] for r in records]


def write_truth(path, truth):
    lines = [f"#truth {len(truth.u_true)} {len(truth.v_true)}"]
    lines.extend(_sparse_lines("u", truth.u_true))
    lines.extend(_sparse_lines("v", truth.v_true))
    _write_lines(path, lines)


def read_truth(path):
    lines = _read_lines(path)
    if not lines or not lines[0].startswith("#truth"):
        raise FormatError(path, "missing '#truth n p' header", 1)
    parts = lines[0].split()
    if len(parts) != 3:
        raise FormatError(path, "header must be '#truth n p'", 1)
    vectors = {"u": np.zeros(_parse_int(parts[1], path, 1)), "v": np.zeros(_parse_int(parts[2], path, 1))}
    for number, line in enumerate(lines[1:], start=2):
        if line:
            _read_sparse_entry(line.split("\t"), vectors, path, number)
    return GroundTruth(vectors["u"], vectors["v"])


def write_traces(path, traces):
    lines = []
    for k, trace in enumerate(traces):
        lines.append(f"#trace {k} iterations={trace.iterations} converged={_format_bool(trace.converged)}")
        lines.extend(f"{k}\t{i}\t{format_real(d)}" for i, d in enumerate(trace.d_history, start=1))
    _write_lines(path, lines)


def read_traces(path):
    traces = []
    current = None
    for number, line in enumerate(_read_lines(path), start=1):
        if not line:
            continue
        if line.startswith("#trace"):
            parts = line.split()
            if (len(parts) != 4 or not parts[2].startswith("iterations=")
                    or not parts[3].startswith("converged=")):
                raise FormatError(path, "trace headers must be '#trace k iterations=N converged=<bool>'", number)
            current = {"iterations": _parse_int(parts[2][len("iterations="):], path, number),
                       "converged": _parse_bool(parts[3][len("converged="):], path, number),
                       "d": []}
            traces.append(current)
            continue
        fields = line.split("\t")
        if current is None or len(fields) != 3:
            raise FormatError(path, "trace rows must be 'factor<TAB>iteration<TAB>d'", number)
        current["d"].append(_parse_real(fields[2], path, number))
    return [IterationTrace(tuple(t["d"]), t["iterations"], t["converged"]) for t in traces]


def _format_cell(value):
    if value is None:
        return NOT_AVAILABLE
    if isinstance(value, bool):
        return _format_bool(value)
    if isinstance(value, float):
        return format_real(value)
    return str(value)


def write_report(path, columns, rows, summary):
    """
    Writes an evaluation report.

    :param columns: Column names of the per-factor table.
    :param rows: Sequence of dicts keyed by column name; missing or None cells print as NA.
    :param summary: Mapping of metric name to value.
    """
    lines = ["# factors", "\t".join(columns)]
    lines.extend("\t".join(_format_cell(row.get(column)) for column in columns) for row in rows)
    lines.append("# summary")
    lines.append("metric\tvalue")
    lines.extend(f"{name}\t{_format_cell(value)}" for name, value in summary.items())
    _write_lines(path, lines)


def read_report(path):
    """
    Reads a report back as (columns, rows, summary); cells stay strings, summary values are floats
    (None for NA).
    """
    lines = _read_lines(path)
    try:
        table_start = lines.index("# factors")
        summary_start = lines.index("# summary")
    except ValueError:
        raise FormatError(path, "report must contain '# factors' and '# summary' sections") from None
    columns = lines[table_start + 1].split("\t")
    rows = []
    for number in range(table_start + 2, summary_start):
        if lines[number]:
            cells = lines[number].split("\t")
            if len(cells) != len(columns):
                raise FormatError(path, f"expected {len(columns)} cells", number + 1)
            rows.append(dict(zip(columns, cells)))
    summary = {}
    for number in range(summary_start + 2, len(lines)):
        if lines[number]:
            name, _, value = lines[number].partition("\t")
            summary[name] = None if value == NOT_AVAILABLE else _parse_real(value, path, number + 1)
    return columns, rows, summary


def write_manifest(path, manifest):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(manifest, sort_keys=True, indent=2))
        handle.write("\n")


def read_manifest(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise FormatError(path, f"invalid JSON: {exc.msg}", exc.lineno) from None
