"""
This module defines the `FactorTriple` class, one extracted rank-one factor (u, v, d) of a data matrix.

Classes:
    - FactorTriple: Immutable left vector, right vector and singular value.
"""

from dataclasses import dataclass

import numpy as np

from sgsvd.errors import ConfigError

NORM_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class FactorTriple:
    """
    One rank-one factor d * u * v^T.

    Attributes:
        u (numpy.ndarray): Unit-norm left vector of length n.
        v (numpy.ndarray): Unit-norm right vector of length p.
        d (float): Non-negative singular value.
    """

    u: np.ndarray
    v: np.ndarray
    d: float

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64)
        v = np.array(self.v, dtype=np.float64)
        if u.ndim != 1 or v.ndim != 1:
            raise ConfigError("factor vectors must be one-dimensional")
        if self.d < 0:
            raise ConfigError(f"singular value must be non-negative, got {self.d}")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "d", float(self.d))

    @property
    def u_support(self):
        """
        Indices of the nonzero entries of u.
        """
        return np.flatnonzero(self.u)

    @property
    def v_support(self):
        """
        Indices of the nonzero entries of v.
        """
        return np.flatnonzero(self.v)

    def is_unit(self, tolerance=NORM_TOLERANCE):
        """
        Returns True if both vectors have 2-norm 1 within the tolerance.
        """
        return (abs(np.linalg.norm(self.u) - 1.0) <= tolerance
                and abs(np.linalg.norm(self.v) - 1.0) <= tolerance)

    def outer(self):
        """
        Returns the dense rank-one matrix d * u * v^T.
        """
        return self.d * np.outer(self.u, self.v)

    def __eq__(self, other):
        if isinstance(other, FactorTriple):
            return (self.d == other.d and np.array_equal(self.u, other.u)
                    and np.array_equal(self.v, other.v))
        return NotImplemented

    def __hash__(self):
        return hash((self.d, self.u.tobytes(), self.v.tobytes()))
