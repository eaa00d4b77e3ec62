"""
This module defines the `PriorGraph` class, an undirected simple graph over the row or column
variables of the data matrix, and the Laplacian operations the solvers need.

The Laplacian L = D - A is never materialized as a dense matrix. Adjacency is kept as a
`scipy.sparse` CSR matrix, so applying L or summing over a vertex's neighbours costs
O(|edges| + n). The normalized Laplacian D^(-1/2) L D^(-1/2) is obtained by reweighting every edge
by 1/sqrt(d_i d_j) and replacing the diagonal degree by 1 (0 for isolated vertices).

Classes:
    - LaplacianMode: Selects the raw or the degree-normalized Laplacian.
    - PriorGraph: Immutable undirected simple graph with degree vector and CSR adjacency.

Functions:
    - laplacian_apply: L x (or the normalized analogue).
    - neighbor_sum: sum over the neighbours of one vertex, weighted per mode.
    - normalized_degree: diagonal entry of the chosen Laplacian.
    - laplacian_quadratic: x^T L x evaluated edge by edge.
"""

from enum import Enum

import numpy as np
import scipy.sparse as sp

from sgsvd.errors import DimensionMismatchError, GraphError


class LaplacianMode(Enum):
    """
    Which graph matrix the smoothing term uses.
    """

    RAW = "raw"
    NORMALIZED = "normalized"


class PriorGraph:
    """
    An undirected graph without self-loops or multi-edges. Each edge is stored once as (i, j)
    with i < j, sorted lexicographically.

    Attributes:
        _n_vertices (int): Number of vertices.
        _edges (numpy.ndarray): Array of shape (m, 2) holding the canonical edge list.
        _degrees (numpy.ndarray): Integer degree of every vertex.
        _adjacency (scipy.sparse.csr_matrix): Symmetric 0/1 adjacency.
        _normalized (scipy.sparse.csr_matrix): Adjacency reweighted by 1/sqrt(d_i d_j).
    """

    def __init__(self, n_vertices, edges=()):
        """
        Builds a graph from a vertex count and an iterable of vertex pairs.

        :param n_vertices: Number of vertices (>= 0).
        :param edges: Iterable of (i, j) pairs with 0 <= i, j < n_vertices. Order within a pair
            does not matter, but each unordered pair may appear only once.
        :raises GraphError: On a negative vertex count, a self-loop, an out-of-range vertex or a
            duplicated edge.
        """
        if n_vertices < 0:
            raise GraphError(f"vertex count must be non-negative, got {n_vertices}")
        pairs = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
        if pairs.size:
            if pairs.min() < 0 or pairs.max() >= n_vertices:
                raise GraphError(f"edge endpoint outside 0..{n_vertices - 1}")
            if np.any(pairs[:, 0] == pairs[:, 1]):
                loop = int(pairs[pairs[:, 0] == pairs[:, 1]][0, 0])
                raise GraphError(f"self-loop at vertex {loop}")
            pairs = np.sort(pairs, axis=1)
            order = np.lexsort((pairs[:, 1], pairs[:, 0]))
            pairs = pairs[order]
            repeated = np.all(pairs[1:] == pairs[:-1], axis=1)
            if np.any(repeated):
                i, j = pairs[1:][repeated][0]
                raise GraphError(f"duplicate edge ({i}, {j})")

        self._n_vertices = int(n_vertices)
        self._edges = pairs
        self._edges.setflags(write=False)

        m = len(pairs)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        adjacency = sp.csr_matrix((np.ones(2 * m), (rows, cols)), shape=(n_vertices, n_vertices))
        adjacency.sort_indices()
        self._adjacency = adjacency

        self._degrees = np.bincount(rows, minlength=n_vertices).astype(np.int64)
        self._degrees.setflags(write=False)

        scale = np.zeros(n_vertices)
        connected = self._degrees > 0
        scale[connected] = 1.0 / np.sqrt(self._degrees[connected])
        normalized = sp.csr_matrix(adjacency.multiply(scale[:, None]).multiply(scale[None, :]))
        normalized.sort_indices()
        self._normalized = normalized

        self._diagonals = {
            LaplacianMode.RAW: self._degrees.astype(np.float64),
            LaplacianMode.NORMALIZED: connected.astype(np.float64),
        }

    @classmethod
    def empty(cls, n_vertices):
        """
        Returns a graph with n_vertices isolated vertices. Using it on one side of a fit is the same
        as setting sigma = 0 on that side.
        """
        return cls(n_vertices)

    @classmethod
    def from_adjacency(cls, adjacency):
        """
        Builds a graph from a square symmetric 0/1 matrix (dense or sparse). Only the strict upper
        triangle is read.

        :raises GraphError: If the matrix is not square.
        """
        matrix = sp.csr_matrix(adjacency)
        if matrix.shape[0] != matrix.shape[1]:
            raise GraphError(f"adjacency must be square, got {matrix.shape}")
        upper = sp.triu(matrix, k=1).tocoo()
        keep = upper.data != 0
        return cls(matrix.shape[0], zip(upper.row[keep].tolist(), upper.col[keep].tolist()))

    @property
    def n_vertices(self):
        return self._n_vertices

    @property
    def n_edges(self):
        return len(self._edges)

    @property
    def edges(self):
        """
        The canonical (i < j) edge list as a read-only array of shape (m, 2).
        """
        return self._edges

    @property
    def degrees(self):
        return self._degrees

    def adjacency(self, mode=LaplacianMode.RAW):
        """
        Returns the sparse adjacency used by the given Laplacian mode: 0/1 weights for RAW,
        1/sqrt(d_i d_j) weights for NORMALIZED.
        """
        return self._adjacency if mode is LaplacianMode.RAW else self._normalized

    def diagonal(self, mode=LaplacianMode.RAW):
        """
        Returns the Laplacian diagonal for the given mode as a float array.
        """
        return self._diagonals[mode]

    def neighbors(self, k):
        """
        Returns the sorted neighbour indices of vertex k.

        :raises IndexError: If k is not a vertex.
        """
        self._check_vertex(k)
        start, stop = self._adjacency.indptr[k], self._adjacency.indptr[k + 1]
        return self._adjacency.indices[start:stop].copy()

    def has_edge(self, i, j):
        """
        Returns True if the unordered pair {i, j} is an edge.
        """
        self._check_vertex(i)
        self._check_vertex(j)
        return bool(self._adjacency[i, j])

    def count_internal_edges(self, vertices):
        """
        Counts the edges whose two endpoints both lie in the given vertex set.

        :param vertices: Iterable of vertex indices.
        :return: The number of induced edges.
        """
        members = np.zeros(self._n_vertices, dtype=bool)
        index = np.fromiter(vertices, dtype=np.int64)
        if index.size and (index.min() < 0 or index.max() >= self._n_vertices):
            raise IndexError("vertex index out of range")
        members[index] = True
        if not len(self._edges):
            return 0
        return int(np.count_nonzero(members[self._edges[:, 0]] & members[self._edges[:, 1]]))

    def _check_vertex(self, k):
        if not 0 <= k < self._n_vertices:
            raise IndexError(f"vertex {k} out of range for a graph with {self._n_vertices} vertices")

    def __eq__(self, other):
        if isinstance(other, PriorGraph):
            return self._n_vertices == other._n_vertices and np.array_equal(self._edges, other._edges)
        return NotImplemented

    def __hash__(self):
        return hash((self._n_vertices, self._edges.tobytes()))

    def __repr__(self):
        return f"PriorGraph(n_vertices={self._n_vertices}, n_edges={self.n_edges})"


def _check_length(g, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n_vertices,):
        raise DimensionMismatchError(
            f"vector of shape {x.shape} does not match a graph with {g.n_vertices} vertices")
    return x


def laplacian_apply(g, x, mode=LaplacianMode.RAW):
    """
    Returns L x, with L = D - A (RAW) or D^(-1/2) L D^(-1/2) (NORMALIZED), from the sparse adjacency.

    :param g: The prior graph.
    :param x: Vector of length g.n_vertices.
    :param mode: Laplacian variant.
    :raises DimensionMismatchError: If len(x) differs from the vertex count.
    """
    x = _check_length(g, x)
    return g.diagonal(mode) * x - g.adjacency(mode) @ x


def neighbor_sum(g, x, k, mode=LaplacianMode.RAW):
    """
    Returns sum_j w_kj x_j over the neighbours j of vertex k, with w_kj = 1 (RAW) or
    1/sqrt(d_k d_j) (NORMALIZED).

    :raises IndexError: If k is not a vertex of g.
    :raises DimensionMismatchError: If len(x) differs from the vertex count.
    """
    x = _check_length(g, x)
    if not 0 <= k < g.n_vertices:
        raise IndexError(f"vertex {k} out of range for a graph with {g.n_vertices} vertices")
    adjacency = g.adjacency(mode)
    start, stop = adjacency.indptr[k], adjacency.indptr[k + 1]
    return float(adjacency.data[start:stop] @ x[adjacency.indices[start:stop]])


def normalized_degree(g, k, mode=LaplacianMode.RAW):
    """
    Returns the diagonal Laplacian entry of vertex k: its degree in RAW mode; in NORMALIZED mode 1
    for a connected vertex and 0 for an isolated one.
    """
    return float(g.diagonal(mode)[k])


def laplacian_quadratic(g, x, mode=LaplacianMode.RAW):
    """
    Returns x^T L x as a sum over the stored edges. In RAW mode this is sum (x_i - x_j)^2; in
    NORMALIZED mode the same sum over x_i/sqrt(d_i) - x_j/sqrt(d_j).
    """
    x = _check_length(g, x)
    if not g.n_edges:
        return 0.0
    i, j = g.edges[:, 0], g.edges[:, 1]
    if mode is LaplacianMode.NORMALIZED:
        scaled = np.zeros_like(x)
        connected = g.degrees > 0
        scaled[connected] = x[connected] / np.sqrt(g.degrees[connected])
        x = scaled
    return float(np.sum((x[i] - x[j]) ** 2))
