"""
This module implements the one-sided updates of the alternating sparse projection loop: with the
other vector fixed and z = X v (or X^T u), compute the new unit vector for this side.

Every variant shares one kernel, `coordinate_sweep`, which evaluates

    x_k = soft(target_k + sigma * sum_j w_kj m_j, shrink) / den_k

for k in ascending order. In Gauss-Seidel order m_k is overwritten by x_k as soon as it is
computed; in Jacobi order m stays at the previous iterate. The variants differ in what they feed
the kernel and what they do with its output:

    - starred rules sweep over |z| and |previous| and restore the signs of z at the end,
    - the classic rule sweeps over the signed z and the signed previous iterate,
    - L1 rules shrink inside the sweep, top-k rules project after it.

Classes:
    - SubproblemUpdate: Abstract one-sided update.
    - SoftThresholdUpdate: L1-sgSVD* rule (soft threshold, sign restoration).
    - TopKUpdate: L0-sgSVD* / L0SVD rule (top-k projection, sign restoration).
    - SignedGraphUpdate: classical sgSVD rule (signed smoothing, no sign restoration).
"""

from abc import ABC, abstractmethod

import numpy as np

from sgsvd.config import DenominatorMode, SweepOrder, Variant
from sgsvd.errors import ConfigError, DegenerateUpdateError, DimensionMismatchError
from sgsvd.graph import laplacian_quadratic


def restore_signs(v_abs, z):
    """
    Returns v_abs * sign(z) elementwise, with sign(0) = 0.

    :param v_abs: Non-negative vector.
    :param z: Vector of the same length whose signs are applied.
    :raises ConfigError: If v_abs has a negative entry.
    :raises DimensionMismatchError: If the lengths differ.
    """
    v_abs = np.asarray(v_abs, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if v_abs.shape != z.shape:
        raise DimensionMismatchError(f"shapes {v_abs.shape} and {z.shape} differ")
    if np.any(v_abs < 0):
        raise ConfigError("restore_signs expects a non-negative vector")
    return v_abs * np.sign(z)


def project_top_k(v, k_card):
    """
    Keeps the k_card entries of largest absolute value and zeros the rest. Ties at the threshold
    keep the smaller index.

    :param v: Input vector.
    :param k_card: Number of entries to keep, 1 <= k_card <= len(v).
    :return: A new vector; kept entries are unchanged.
    :raises ConfigError: If k_card is out of range.
    """
    v = np.asarray(v, dtype=np.float64)
    if not 1 <= k_card <= len(v):
        raise ConfigError(f"k_card must lie in 1..{len(v)}, got {k_card}")
    if k_card == len(v):
        return v.copy()
    keep = np.argsort(-np.abs(v), kind="stable")[:k_card]
    out = np.zeros_like(v)
    out[keep] = v[keep]
    return out


def _soft(x, shrink):
    if shrink == 0:
        return x
    return np.sign(x) * np.maximum(np.abs(x) - shrink, 0.0)


def _denominators(g, sigma, cfg):
    if cfg.denominator_mode is DenominatorMode.ALGORITHM_PSEUDOCODE:
        return np.ones(g.n_vertices)
    den = cfg.eta + sigma * g.diagonal(cfg.laplacian_mode)
    zero = np.flatnonzero(den == 0)
    if zero.size:
        raise DegenerateUpdateError(
            f"zero denominator at coordinate {int(zero[0])} (eta = {cfg.eta}, sigma = {sigma})")
    return den


def coordinate_sweep(target, g, start, shrink, sigma, cfg):
    """
    Runs one unnormalized coordinate sweep.

    :param target: |z| for the starred rules, z for the classic rule.
    :param g: Prior graph over the coordinates of this side.
    :param start: Previous iterate (magnitudes for starred rules) seeding the neighbour sums.
    :param shrink: Soft threshold applied inside the sweep (0 for none).
    :param sigma: Graph smoothing weight.
    :param cfg: SolverConfig supplying denominator, Laplacian and sweep modes.
    :return: The swept vector x.
    :raises DimensionMismatchError: If the vectors do not match the graph.
    :raises DegenerateUpdateError: If an EXACT_KKT denominator is zero.
    """
    target = np.asarray(target, dtype=np.float64)
    start = np.asarray(start, dtype=np.float64)
    if target.shape != (g.n_vertices,) or start.shape != (g.n_vertices,):
        raise DimensionMismatchError(
            f"vectors of shape {target.shape} and {start.shape} do not match a graph with "
            f"{g.n_vertices} vertices")
    den = _denominators(g, sigma, cfg)

    if sigma == 0 or g.n_edges == 0:
        return _soft(target, shrink) / den
    adjacency = g.adjacency(cfg.laplacian_mode)
    if cfg.sweep is SweepOrder.JACOBI:
        return _soft(target + sigma * (adjacency @ start), shrink) / den

    indptr = adjacency.indptr.tolist()
    indices = adjacency.indices.tolist()
    weights = adjacency.data.tolist()
    t = target.tolist()
    d = den.tolist()
    m = start.tolist()
    for k in range(len(m)):
        acc = 0.0
        for pos in range(indptr[k], indptr[k + 1]):
            acc += weights[pos] * m[indices[pos]]
        x = t[k] + sigma * acc
        if shrink:
            if x > shrink:
                x -= shrink
            elif x < -shrink:
                x += shrink
            else:
                x = 0.0
        m[k] = x / d[k]
    return np.array(m)


def lagrangian_objective(v, abs_z, g, lam, sigma, eta, laplacian_mode):
    """
    Evaluates -v^T|z| + lam * sum(v) + eta/2 * v^T v + sigma/2 * v^T L v for a non-negative v.
    Exact-KKT Gauss-Seidel sweeps minimize it coordinate by coordinate, so it never increases
    from one sweep to the next.
    """
    v = np.asarray(v, dtype=np.float64)
    abs_z = np.asarray(abs_z, dtype=np.float64)
    return float(-v @ abs_z + lam * v.sum() + 0.5 * eta * (v @ v)
                 + 0.5 * sigma * laplacian_quadratic(g, v, laplacian_mode))


class SubproblemUpdate(ABC):
    """
    Abstract one-sided update. Subclasses decide what the sweep runs on, how the result is made
    sparse and how signs are recovered; `apply` strings those steps together and normalizes.

    Attributes:
        sigma (float): Graph smoothing weight for this side.
        cfg (SolverConfig): Configuration supplying the sweep options.
    """

    def __init__(self, sigma, cfg):
        """
        :param sigma: Graph smoothing weight (>= 0).
        :param cfg: The solver configuration.
        """
        if sigma < 0:
            raise ConfigError(f"sigma must be >= 0, got {sigma}")
        self.sigma = float(sigma)
        self.cfg = cfg

    @property
    def shrink(self):
        """
        Soft threshold used inside the sweep.
        """
        return 0.0

    @abstractmethod
    def sweep_inputs(self, z, previous):
        """
        Returns the (target, start) pair fed to `coordinate_sweep`.
        """
        pass

    @abstractmethod
    def sparsify(self, swept):
        """
        Returns the swept vector after any cardinality projection.
        """
        pass

    @abstractmethod
    def finish(self, unit, z):
        """
        Returns the final vector from the normalized one (sign restoration for starred rules).
        """
        pass

    def apply(self, z, g, previous):
        """
        Computes the updated unit vector.

        :param z: X v for a u-update, X^T u for a v-update.
        :param g: Prior graph for this side.
        :param previous: This side's previous iterate (zero vector before the first iteration).
        :return: The new unit-norm vector.
        :raises DegenerateUpdateError: If thresholding leaves nothing to normalize.
        """
        z = np.asarray(z, dtype=np.float64)
        target, start = self.sweep_inputs(z, np.asarray(previous, dtype=np.float64))
        swept = self.sparsify(coordinate_sweep(target, g, start, self.shrink, self.sigma, self.cfg))
        norm = np.linalg.norm(swept)
        if norm == 0 or not np.isfinite(norm):
            raise DegenerateUpdateError(
                f"{type(self).__name__} produced an all-zero vector; the threshold leaves no coordinate")
        return self.finish(swept / norm, z)


class SoftThresholdUpdate(SubproblemUpdate):
    """
    L1-sgSVD* update: x_k = max(|z_k| + sigma * A_k m - lam, 0), normalized, signs of z restored.
    """

    def __init__(self, lam, sigma, cfg):
        super().__init__(sigma, cfg)
        if lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {lam}")
        self.lam = float(lam)

    @property
    def shrink(self):
        return self.lam

    def sweep_inputs(self, z, previous):
        return np.abs(z), np.abs(previous)

    def sparsify(self, swept):
        return swept

    def finish(self, unit, z):
        return restore_signs(unit, z)


class TopKUpdate(SubproblemUpdate):
    """
    L0-sgSVD* update (L0SVD when sigma = 0): x_k = |z_k| + sigma * A_k m, keep the k largest,
    normalize, restore the signs of z.
    """

    def __init__(self, k_card, sigma, cfg):
        super().__init__(sigma, cfg)
        if k_card is None:
            raise ConfigError("the top-k update needs a cardinality")
        self.k_card = k_card

    def sweep_inputs(self, z, previous):
        return np.abs(z), np.abs(previous)

    def sparsify(self, swept):
        return project_top_k(swept, self.k_card)

    def finish(self, unit, z):
        return restore_signs(unit, z)


class SignedGraphUpdate(SubproblemUpdate):
    """
    Classical sgSVD update with the signed penalty v^T L v: x_k = z_k + sigma * A_k v, thresholded by
    magnitude (top-k when k_card is set, soft threshold lam otherwise), normalized, signs kept as
    they come out of the sweep.
    """

    def __init__(self, k_card, lam, sigma, cfg):
        super().__init__(sigma, cfg)
        if lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {lam}")
        self.k_card = k_card
        self.lam = float(lam) if k_card is None else 0.0

    @property
    def shrink(self):
        return self.lam

    def sweep_inputs(self, z, previous):
        return z, previous

    def sparsify(self, swept):
        if self.k_card is None:
            return swept
        return project_top_k(swept, self.k_card)

    def finish(self, unit, z):
        return unit


def update_l1(z, g, v_prev, lam, sigma, cfg):
    """
    One L1-sgSVD* update of a single side.

    :param z: X^T u (or X v).
    :param g: Prior graph for this side.
    :param v_prev: Previous iterate of this side.
    :param lam: Soft threshold (>= 0).
    :param sigma: Smoothing weight (>= 0).
    :param cfg: Solver configuration.
    :return: Unit vector v with v_k * z_k >= 0 for every k.
    :raises DegenerateUpdateError: If lam removes every coordinate.
    """
    return SoftThresholdUpdate(lam, sigma, cfg).apply(z, g, v_prev)


def update_l0(z, g, v_prev, k_card, sigma, cfg):
    """
    One L0-sgSVD* update of a single side.

    :param k_card: Number of nonzero coordinates to keep, 1 <= k_card <= len(z).
    :return: Unit vector with at most k_card nonzeros and v_k * z_k >= 0 for every k.
    :raises ConfigError: If k_card is out of range.
    :raises DegenerateUpdateError: If the swept vector is identically zero.
    """
    z = np.asarray(z, dtype=np.float64)
    if not 1 <= k_card <= len(z):
        raise ConfigError(f"k_card must lie in 1..{len(z)}, got {k_card}")
    return TopKUpdate(k_card, sigma, cfg).apply(z, g, v_prev)


def update_rule_for(cfg, side):
    """
    Builds the update rule for one side of a fit.

    :param cfg: Solver configuration.
    :param side: "u" or "v".
    :return: A `SubproblemUpdate` instance.
    """
    if side not in ("u", "v"):
        raise ConfigError(f"side must be 'u' or 'v', got {side!r}")
    k_card = cfg.k_u if side == "u" else cfg.k_v
    lam = cfg.lambda_u if side == "u" else cfg.lambda_v
    sigma = cfg.effective_sigma_u() if side == "u" else cfg.effective_sigma_v()
    if cfg.variant is Variant.L1_SGSVD_STAR:
        return SoftThresholdUpdate(lam, sigma, cfg)
    if cfg.variant is Variant.SGSVD_CLASSIC:
        return SignedGraphUpdate(k_card, lam, sigma, cfg)
    return TopKUpdate(k_card, sigma, cfg)
