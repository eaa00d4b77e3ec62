"""
This module generates the synthetic benchmark: a sparse rank-one signal u v^T plus Gaussian noise of
scale gamma, and two prior graphs whose first `support` vertices form a denser block.

Random stream. A dataset is drawn from one `numpy.random.Generator(PCG64(seed))` in this order:

    1. signs of the u support (`support_u` uniforms, sign = -1 if draw < 0.5 else +1),
    2. signs of the v support (`support_v` uniforms),
    3. the n x p noise matrix, row-major, each entry `ndtri(uniform)`,
    4. the row graph: one uniform per vertex pair (i, j), i < j, in lexicographic order,
    5. the column graph, likewise.

Only `Generator.random` is ever called, so another implementation of PCG64 reproduces every fixture.

Classes:
    - SignMode: Mixed random signs or the same-sign variant.
    - SimSpec: Dimensions, supports, noise scale, graph probabilities and seed.
    - GroundTruth: The planted unit vectors and their supports.
    - Dataset: Matrix, truth and both prior graphs.
"""

import logging
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np
from scipy.special import ndtri

from sgsvd.errors import ConfigError
from sgsvd.graph import PriorGraph
from sgsvd.matrix import DenseMatrix

logger = logging.getLogger(__name__)


class SignMode(Enum):
    """
    MIXED draws every support sign uniformly from {-1, +1}. SAME_SIGN then sets u := |u| and
    v := -|v|.
    """

    MIXED = "mixed"
    SAME_SIGN = "same-sign"


@dataclass(frozen=True)
class SimSpec:
    """
    Parameters of one synthetic dataset. Defaults follow the published setup.

    Attributes:
        n (int): Rows.
        p (int): Columns.
        support_u (int): Nonzeros of the planted u (leading coordinates).
        support_v (int): Nonzeros of the planted v.
        gamma (float): Noise scale, X = u v^T + gamma * noise.
        sign_mode (SignMode): Sign pattern of the planted vectors.
        p11 (float): Edge probability inside the support block.
        p12 (float): Edge probability for every other pair.
        seed (int): Seed of the generator.
    """

    n: int = 100
    p: int = 100
    support_u: int = 50
    support_v: int = 50
    gamma: float = 0.06
    sign_mode: SignMode = SignMode.MIXED
    p11: float = 0.3
    p12: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ConfigError(f"dimensions must be positive, got n = {self.n}, p = {self.p}")
        if not 1 <= self.support_u <= self.n:
            raise ConfigError(f"support_u = {self.support_u} must lie in 1..n = {self.n}")
        if not 1 <= self.support_v <= self.p:
            raise ConfigError(f"support_v = {self.support_v} must lie in 1..p = {self.p}")
        if not self.gamma >= 0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        for name in ("p11", "p12"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if not isinstance(self.sign_mode, SignMode):
            raise ConfigError(f"sign_mode must be a SignMode, got {self.sign_mode!r}")

    def with_changes(self, **changes):
        values = {field.name: getattr(self, field.name) for field in fields(self)}
        values.update(changes)
        return SimSpec(**values)

    def to_dict(self):
        out = {field.name: getattr(self, field.name) for field in fields(self)}
        out["sign_mode"] = self.sign_mode.value
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        if "sign_mode" in data:
            try:
                data["sign_mode"] = SignMode(data["sign_mode"])
            except ValueError:
                raise ConfigError(f"invalid sign_mode: {data['sign_mode']!r}") from None
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """
    The planted factor.

    Attributes:
        u_true (numpy.ndarray): Unit left vector.
        v_true (numpy.ndarray): Unit right vector.
    """

    u_true: np.ndarray
    v_true: np.ndarray

    @property
    def support_u_idx(self):
        return np.flatnonzero(self.u_true)

    @property
    def support_v_idx(self):
        return np.flatnonzero(self.v_true)

    def __eq__(self, other):
        if isinstance(other, GroundTruth):
            return np.array_equal(self.u_true, other.u_true) and np.array_equal(self.v_true, other.v_true)
        return NotImplemented

    def __hash__(self):
        return hash((self.u_true.tobytes(), self.v_true.tobytes()))


@dataclass(frozen=True)
class Dataset:
    """
    One simulated dataset: the matrix, its truth and the row and column prior graphs.
    """

    matrix: DenseMatrix
    truth: GroundTruth
    row_graph: PriorGraph
    col_graph: PriorGraph

    def __iter__(self):
        return iter((self.matrix, self.truth, self.row_graph, self.col_graph))


def make_rng(seed):
    """
    Returns the generator every simulation draws from: `Generator(PCG64(seed))`.
    """
    return np.random.Generator(np.random.PCG64(seed))


def standard_normals(rng, shape):
    """
    Draws standard normals by the inverse-CDF transform of `rng.random(shape)`.
    """
    uniforms = rng.random(shape)
    # ndtri(0) is -inf
    uniforms[uniforms == 0.0] = np.nextafter(0.0, 1.0)
    return ndtri(uniforms)


def gen_signal_vector(dim, support, sign_mode, rng, negate=False):
    """
    Returns a unit vector whose first `support` coordinates are +-1/sqrt(support) and the rest zero.

    :param dim: Vector length.
    :param support: Number of leading nonzeros, <= dim.
    :param sign_mode: MIXED keeps the drawn signs; SAME_SIGN takes absolute values.
    :param rng: numpy Generator; consumes `support` uniforms in either mode.
    :param negate: With SAME_SIGN, return -|v| instead of |v| (used for the column vector).
    :raises ConfigError: If support > dim or support < 1.
    """
    if not 1 <= support <= dim:
        raise ConfigError(f"support {support} must lie in 1..{dim}")
    signs = np.where(rng.random(support) < 0.5, -1.0, 1.0)
    if sign_mode is SignMode.SAME_SIGN:
        signs = -np.ones(support) if negate else np.ones(support)
    vector = np.zeros(dim)
    vector[:support] = signs
    return vector / np.linalg.norm(vector)


def gen_block_graph(dim, support, p11, p12, rng):
    """
    Draws a graph on `dim` vertices: pair (i, j), i < j, is an edge with probability p11 when both
    endpoints are below `support`, and with probability p12 otherwise.

    :param rng: numpy Generator; consumes dim * (dim - 1) / 2 uniforms in lexicographic pair order.
    :raises ConfigError: If a probability lies outside [0, 1].
    """
    for name, value in (("p11", p11), ("p12", p12)):
        if not 0 <= value <= 1:
            raise ConfigError(f"{name} must lie in [0, 1], got {value}")
    rows, cols = np.triu_indices(dim, k=1)
    draws = rng.random(len(rows))
    threshold = np.where((rows < support) & (cols < support), p11, p12)
    keep = draws < threshold
    return PriorGraph(dim, np.column_stack([rows[keep], cols[keep]]))


def gen_dataset(spec):
    """
    Draws X = u v^T + gamma * noise and both prior graphs, fully determined by spec.seed.

    :param spec: SimSpec.
    :return: Dataset (unpacks as matrix, truth, row_graph, col_graph).
    """
    rng = make_rng(spec.seed)
    u = gen_signal_vector(spec.n, spec.support_u, spec.sign_mode, rng)
    v = gen_signal_vector(spec.p, spec.support_v, spec.sign_mode, rng, negate=True)
    noise = standard_normals(rng, (spec.n, spec.p))
    matrix = DenseMatrix(np.outer(u, v) + spec.gamma * noise)
    row_graph = gen_block_graph(spec.n, spec.support_u, spec.p11, spec.p12, rng)
    col_graph = gen_block_graph(spec.p, spec.support_v, spec.p11, spec.p12, rng)
    logger.debug("simulated %d x %d dataset (gamma %.4g, seed %d): %d row edges, %d column edges",
                 spec.n, spec.p, spec.gamma, spec.seed, row_graph.n_edges, col_graph.n_edges)
    return Dataset(matrix, GroundTruth(u, v), row_graph, col_graph)


def gamma_grid(start, stop, step):
    """
    Returns the inclusive grid start, start + step, ..., stop, rounded to 10 decimals.

    :raises ConfigError: If step <= 0 or stop < start.
    """
    if step <= 0 or stop < start:
        raise ConfigError(f"invalid gamma grid {start}..{stop} step {step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]
