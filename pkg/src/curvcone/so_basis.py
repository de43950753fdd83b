"""Index bookkeeping for the bivector space Lambda^2 R^n = so(n).

External indices are 1-based, matching the usual ``e_i ^ e_j`` notation;
everything internal is 0-based.  Pairs ``(i, j)`` with ``i < j`` are ordered
lexicographically.

The bivector ``e_i ^ e_j`` is realised as the skew matrix with ``+1`` at
``(j, i)`` and ``-1`` at ``(i, j)``.  Under ``<X, Y> = -tr(XY)/2`` these
matrices are orthonormal.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError

SKEW_TOL = 1e-12


def _check_dim(n):
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class BasisIndexer:
    """Bijection between pairs ``1 <= i < j <= n`` and ``1..N``."""

    n: int

    def __post_init__(self):
        _check_dim(self.n)

    @property
    def N(self):
        return self.n * (self.n - 1) // 2

    def pair_index(self, i, j):
        return pair_index(i, j, self.n)

    def index_pair(self, k):
        return index_pair(k, self.n)

    def pairs(self):
        """All pairs in order, 1-based."""
        return [(i + 1, j + 1) for i, j in zip(*_pair_arrays(self.n))]


def pair_index(i, j, n):
    """Linear (1-based) index of ``e_i ^ e_j`` for ``1 <= i < j <= n``."""
    n = _check_dim(n)
    if not (1 <= i < j <= n):
        raise InvalidArgumentError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    i0, j0 = i - 1, j - 1
    # pairs before row i0: sum_{r < i0} (n - 1 - r)
    return i0 * (2 * n - i0 - 1) // 2 + (j0 - i0 - 1) + 1


def index_pair(k, n):
    """Inverse of :func:`pair_index`."""
    n = _check_dim(n)
    N = n * (n - 1) // 2
    if not (1 <= k <= N):
        raise InvalidArgumentError(f"index {k} outside 1..{N}")
    rows, cols = _pair_arrays(n)
    return int(rows[k - 1]) + 1, int(cols[k - 1]) + 1


@lru_cache(maxsize=None)
def _pair_arrays(n):
    rows, cols = np.triu_indices(n, k=1)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


@lru_cache(maxsize=None)
def signed_index_map(n):
    """``(idx, sgn)`` with ``e_a ^ e_b = sgn[a, b] * basis[idx[a, b]]``.

    ``sgn`` is 0 on the diagonal, where ``idx`` is an arbitrary valid index.
    """
    rows, cols = _pair_arrays(n)
    idx = np.zeros((n, n), dtype=np.intp)
    sgn = np.zeros((n, n))
    p = np.arange(len(rows))
    idx[rows, cols] = p
    idx[cols, rows] = p
    sgn[rows, cols] = 1.0
    sgn[cols, rows] = -1.0
    idx.setflags(write=False)
    sgn.setflags(write=False)
    return idx, sgn


def basis_bivector(i, j, n):
    """The skew matrix of ``e_i ^ e_j`` (1-based, ``i < j``)."""
    pair_index(i, j, n)
    X = np.zeros((n, n))
    X[j - 1, i - 1] = 1.0
    X[i - 1, j - 1] = -1.0
    return X


def _check_skew(X, name="X"):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise InvalidArgumentError(f"{name} must be a square matrix, got shape {X.shape}")
    scale = max(1.0, float(np.max(np.abs(X))))
    if np.max(np.abs(X + X.T)) > SKEW_TOL * scale:
        raise InvalidArgumentError(f"{name} is not skew-symmetric")
    return X


def inner_so(X, Y):
    """``-tr(XY)/2``; the bivector basis is orthonormal for this product."""
    X = _check_skew(X, "X")
    Y = _check_skew(Y, "Y")
    if X.shape != Y.shape:
        raise InvalidArgumentError(f"dimension mismatch {X.shape} vs {Y.shape}")
    return -0.5 * float(np.einsum("ij,ji->", X, Y))


def bracket(X, Y):
    """Lie bracket ``XY - YX``."""
    X = _check_skew(X, "X")
    Y = _check_skew(Y, "Y")
    if X.shape != Y.shape:
        raise InvalidArgumentError(f"dimension mismatch {X.shape} vs {Y.shape}")
    return X @ Y - Y @ X


def to_vector(X):
    """Coordinates of a skew matrix in the ordered bivector basis."""
    X = np.asarray(X, dtype=float)
    rows, cols = _pair_arrays(X.shape[-1])
    return X[..., cols, rows]


def from_vector(v, n):
    """Skew matrix with bivector coordinates ``v``."""
    v = np.asarray(v, dtype=float)
    rows, cols = _pair_arrays(n)
    X = np.zeros(v.shape[:-1] + (n, n))
    X[..., cols, rows] = v
    X[..., rows, cols] = -v
    return X


@lru_cache(maxsize=None)
def structure_constants(n):
    """``C[p, q, r] = <[e_p, e_q], e_r>`` over the ordered basis."""
    N = n * (n - 1) // 2
    basis = from_vector(np.eye(N), n)
    br = np.einsum("pab,qbc->pqac", basis, basis)
    br = br - br.transpose(1, 0, 2, 3)
    C = to_vector(br)
    C.setflags(write=False)
    return C


def ad_matrix(phi, n):
    """Matrix of ``ad_phi = [phi, .]`` on so(n), for ``phi`` in bivector coordinates.

    Column ``p`` holds the coordinates of ``[phi, e_p]``.
    """
    C = structure_constants(n)
    return np.einsum("a,apr->rp", np.asarray(phi, dtype=float), C)
