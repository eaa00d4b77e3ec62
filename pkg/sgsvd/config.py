"""
This module holds the solver configuration: the variant selector, the penalty and smoothing knobs for
each side, and the stopping and initialization settings.

Classes:
    - Variant: Which of the four rank-one solvers to run.
    - DenominatorMode: Whether coordinate updates divide by (eta + sigma * degree).
    - SweepOrder: Gauss-Seidel (in-place) or Jacobi coordinate sweeps.
    - InitMode: How the first right vector is chosen.
    - SolverConfig: Frozen, self-validating bundle of all of the above.
"""

import math
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Optional

from sgsvd.errors import ConfigError
from sgsvd.graph import LaplacianMode


class Variant(Enum):
    """
    The rank-one solvers. Values double as command-line names.
    """

    L0_SGSVD_STAR = "l0-sgsvd-star"
    L1_SGSVD_STAR = "l1-sgsvd-star"
    SGSVD_CLASSIC = "sgsvd"
    L0SVD = "l0svd"


TOP_K_VARIANTS = (Variant.L0_SGSVD_STAR, Variant.L0SVD)


class DenominatorMode(Enum):
    """
    ALGORITHM_PSEUDOCODE leaves each coordinate undivided and relies on normalization;
    EXACT_KKT divides by (eta + sigma * diagonal_k) as the stationarity condition requires.
    """

    ALGORITHM_PSEUDOCODE = "pseudocode"
    EXACT_KKT = "exact"


class SweepOrder(Enum):
    GAUSS_SEIDEL = "gauss-seidel"
    JACOBI = "jacobi"


class InitMode(Enum):
    POWER_ITERATION = "power"
    SEEDED_RANDOM = "random"


@dataclass(frozen=True)
class SolverConfig:
    """
    All parameters of a rank-one fit.

    Attributes:
        variant (Variant): Solver variant.
        k_u (int | None): Cardinality bound on u. Required by L0_SGSVD_STAR and L0SVD; the classic
            variant falls back to lambda_u when it is None.
        k_v (int | None): Cardinality bound on v.
        lambda_u (float): Soft threshold for u (L1 variant, or classic without k_u).
        lambda_v (float): Soft threshold for v.
        sigma_u (float): Graph smoothing weight on the row side.
        sigma_v (float): Graph smoothing weight on the column side.
        eta (float): Ridge multiplier used by EXACT_KKT denominators.
        denominator_mode (DenominatorMode): See `DenominatorMode`.
        laplacian_mode (LaplacianMode): Raw or normalized Laplacian.
        sweep (SweepOrder): Coordinate sweep order.
        epsilon (float): Stop when |d_t - d_(t-1)| < epsilon.
        max_iter (int): Cap on outer iterations.
        init (InitMode): Initialization of v.
        seed (int): Seed for SEEDED_RANDOM initialization.
    """

    variant: Variant = Variant.L0_SGSVD_STAR
    k_u: Optional[int] = None
    k_v: Optional[int] = None
    lambda_u: float = 0.0
    lambda_v: float = 0.0
    sigma_u: float = 0.0
    sigma_v: float = 0.0
    eta: float = 1.0
    denominator_mode: DenominatorMode = DenominatorMode.ALGORITHM_PSEUDOCODE
    laplacian_mode: LaplacianMode = LaplacianMode.RAW
    sweep: SweepOrder = SweepOrder.GAUSS_SEIDEL
    epsilon: float = 1e-6
    max_iter: int = 1000
    init: InitMode = InitMode.POWER_ITERATION
    seed: int = 0

    def __post_init__(self):
        for name, enum_type in (("variant", Variant), ("denominator_mode", DenominatorMode),
                                ("laplacian_mode", LaplacianMode), ("sweep", SweepOrder),
                                ("init", InitMode)):
            if not isinstance(getattr(self, name), enum_type):
                raise ConfigError(f"{name} must be a {enum_type.__name__}, got {getattr(self, name)!r}")
        for name in ("k_u", "k_v"):
            k = getattr(self, name)
            if k is not None and (not _is_int(k) or k < 1):
                raise ConfigError(f"{name} must be a positive integer or None, got {k!r}")
            if k is None and self.variant in TOP_K_VARIANTS:
                raise ConfigError(f"{self.variant.value} needs {name}")
        for name in ("lambda_u", "lambda_v", "sigma_u", "sigma_v", "eta"):
            value = getattr(self, name)
            if not _is_real(value) or value < 0:
                raise ConfigError(f"{name} must be a finite number >= 0, got {value!r}")
        if not _is_real(self.epsilon) or self.epsilon <= 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon!r}")
        if not _is_int(self.max_iter) or self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter!r}")
        if not _is_int(self.seed):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")

    @property
    def is_l1(self):
        return self.variant is Variant.L1_SGSVD_STAR

    @property
    def is_starred(self):
        """
        True for the variants that smooth magnitudes and restore signs afterwards.
        """
        return self.variant is not Variant.SGSVD_CLASSIC

    def effective_sigma_u(self):
        return 0.0 if self.variant is Variant.L0SVD else self.sigma_u

    def effective_sigma_v(self):
        return 0.0 if self.variant is Variant.L0SVD else self.sigma_v

    def check_dimensions(self, n, p):
        """
        Checks the cardinality bounds against the matrix shape.

        :raises ConfigError: If k_u > n or k_v > p for a variant that uses them.
        """
        if self.is_l1:
            return
        if self.k_u is not None and self.k_u > n:
            raise ConfigError(f"k_u = {self.k_u} exceeds the number of rows {n}")
        if self.k_v is not None and self.k_v > p:
            raise ConfigError(f"k_v = {self.k_v} exceeds the number of columns {p}")

    def with_changes(self, **changes):
        """
        Returns a copy with the given fields replaced (validated again).
        """
        return replace(self, **changes)

    def to_dict(self):
        """
        Returns a JSON-safe dictionary; enums are stored by value.
        """
        out = {}
        for field in fields(self):
            value = getattr(self, field.name)
            out[field.name] = value.value if isinstance(value, Enum) else value
        return out

    @classmethod
    def from_dict(cls, data):
        """
        Inverse of `to_dict`.

        :raises ConfigError: On unknown keys or invalid enum values.
        """
        enums = {"variant": Variant, "denominator_mode": DenominatorMode,
                 "laplacian_mode": LaplacianMode, "sweep": SweepOrder, "init": InitMode}
        known = {field.name for field in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key in enums:
                try:
                    value = enums[key](value)
                except ValueError:
                    raise ConfigError(f"invalid {key}: {value!r}") from None
            kwargs[key] = value
        return cls(**kwargs)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _is_real(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)
