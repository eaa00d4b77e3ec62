"""
The `matrix` module implements the `DenseMatrix` class, the n x p data matrix X that every solver
factorizes. Values are held in a read-only float64 `numpy` array so an instance can be shared freely.

Classes:
    - DenseMatrix: Immutable dense real matrix with shape and finiteness checks.
"""

import numpy as np

from sgsvd.errors import ConfigError, DimensionMismatchError


class DenseMatrix:
    """
    An immutable dense real matrix.

    Attributes:
        _values (numpy.ndarray): Read-only float64 copy of the entries, row-major.
    """

    def __init__(self, values):
        """
        Creates a matrix from any 2-D array-like.

        :param values: Nested sequence or array of real numbers, at least 1 x 1.
        :raises DimensionMismatchError: If the input is not two-dimensional or has an empty axis.
        :raises ConfigError: If any entry is NaN or infinite.
        """
        array = np.array(values, dtype=np.float64, order="C", copy=True)
        if array.ndim != 2:
            raise DimensionMismatchError(f"matrix must be 2-D, got {array.ndim}-D input")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise DimensionMismatchError(f"matrix must be at least 1 x 1, got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ConfigError("matrix entries must be finite")
        array.setflags(write=False)
        self._values = array

    @classmethod
    def zeros(cls, n_rows, n_cols):
        """
        Returns an all-zero matrix of the given shape.
        """
        return cls(np.zeros((n_rows, n_cols)))

    @property
    def values(self):
        """
        The read-only entries as a float64 array.
        """
        return self._values

    @property
    def n_rows(self):
        return self._values.shape[0]

    @property
    def n_cols(self):
        return self._values.shape[1]

    @property
    def shape(self):
        return self._values.shape

    def frobenius_norm(self):
        """
        Returns the Frobenius norm of the matrix.
        """
        return float(np.linalg.norm(self._values))

    def is_zero(self):
        """
        Returns True if every entry is exactly zero.
        """
        return not np.any(self._values)

    def times(self, v):
        """
        Returns X v.

        :param v: Vector of length n_cols.
        :raises DimensionMismatchError: If the length of v is not n_cols.
        """
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.n_cols,):
            raise DimensionMismatchError(f"expected a vector of length {self.n_cols}, got shape {v.shape}")
        return self._values @ v

    def transpose_times(self, u):
        """
        Returns X^T u.

        :param u: Vector of length n_rows.
        :raises DimensionMismatchError: If the length of u is not n_rows.
        """
        u = np.asarray(u, dtype=np.float64)
        if u.shape != (self.n_rows,):
            raise DimensionMismatchError(f"expected a vector of length {self.n_rows}, got shape {u.shape}")
        return self._values.T @ u

    def __eq__(self, other):
        if isinstance(other, DenseMatrix):
            return self.shape == other.shape and bool(np.array_equal(self._values, other._values))
        return NotImplemented

    def __hash__(self):
        return hash((self.shape, self._values.tobytes()))

    def __repr__(self):
        return f"DenseMatrix({self.n_rows} x {self.n_cols})"
