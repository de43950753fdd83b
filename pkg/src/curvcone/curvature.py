"""Algebraic curvature operators on Lambda^2 R^n.

A :class:`CurvatureOperator` stores the symmetric ``N x N`` matrix of the
operator in the orthonormal bivector basis of :mod:`curvcone.so_basis`,
``mat[p, q] = R_ijkl`` for ``p = (i, j)``, ``q = (k, l)``.  The 4-tensor is a
derived view.  With this normalisation ``||R||^2 = sum(mat**2) =
sum(R_ijkl**2) / 4`` and ``<R, S> = tr(R S)``.

The array-level helpers (``*_t`` functions, :func:`mat_to_tensor`,
:func:`tensor_to_mat`) accept leading batch axes.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import InvalidArgumentError, UnsupportedDimensionError
from .rng import substream
from .so_basis import _pair_arrays, signed_index_map

BIANCHI_TOL = 1e-10
ORTHO_TOL = 1e-10


# ----------------------------------------------------------------------------
# array level
# ----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _tensor_gather(n):
    """Flat positions into the ``N x N`` matrix and signs for each ``(i, j, k, l)``."""
    idx, sgn = signed_index_map(n)
    N = n * (n - 1) // 2
    flat = idx[:, :, None, None] * N + idx[None, None, :, :]
    sign = sgn[:, :, None, None] * sgn[None, None, :, :]
    flat.setflags(write=False)
    sign.setflags(write=False)
    return flat, sign


def mat_to_tensor(mat):
    """``R_ijkl`` from the Lambda^2 matrix (batched)."""
    mat = np.asarray(mat, dtype=float)
    N = mat.shape[-1]
    n = dim_from_N(N)
    flat, sign = _tensor_gather(n)
    # np.take keeps the batch axis outermost, so downstream BLAS calls see C order
    return sign * np.take(mat.reshape(mat.shape[:-2] + (N * N,)), flat, axis=-1)


def tensor_to_mat(T):
    """Lambda^2 matrix of a 4-tensor, reading the ``i<j, k<l`` entries (batched)."""
    T = np.asarray(T, dtype=float)
    n = T.shape[-1]
    rows, cols = _pair_arrays(n)
    return np.ascontiguousarray(T[..., rows[:, None], cols[:, None], rows[None, :], cols[None, :]])


@lru_cache(maxsize=None)
def dim_from_N(N):
    n = int(round((1 + np.sqrt(1 + 8 * N)) / 2))
    if n * (n - 1) // 2 != N:
        raise InvalidArgumentError(f"{N} is not a triangular number n(n-1)/2")
    return n


def wedge_t(A, B):
    """``(A ^ B)_ijkl = (a_ik b_jl + b_ik a_jl - a_il b_jk - a_jk b_il) / 2``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    t = np.einsum("...ik,...jl->...ijkl", A, B)
    t = t + np.einsum("...ik,...jl->...ijkl", B, A)
    # the last two terms are the first two with k <-> l
    return 0.5 * (t - t.swapaxes(-1, -2))


def ricci_t(T):
    """``Ric_ij = sum_k R_ikjk``."""
    return np.einsum("...ikjk->...ij", T)


def bianchi_t(T):
    """Alternation ``b(T)_ijkl = (T_ijkl + T_iklj + T_iljk) / 3``."""
    T = np.asarray(T, dtype=float)
    return (T + np.einsum("...iklj->...ijkl", T) + np.einsum("...iljk->...ijkl", T)) / 3.0


def bianchi_project_mat(mat):
    """Project a pair-symmetric Lambda^2 matrix onto the Bianchi subspace."""
    T = mat_to_tensor(mat)
    return tensor_to_mat(T - bianchi_t(T))


@lru_cache(maxsize=None)
def identity_mat(n):
    """Matrix of ``I = id ^ id``: the identity on Lambda^2."""
    M = np.eye(n * (n - 1) // 2)
    M.setflags(write=False)
    return M


def wedge_with_id_mat(A):
    """Lambda^2 matrix of ``A ^ id`` for symmetric ``A`` (batched, no 4-tensor).

    Entries ``(a_ik d_jl + a_jl d_ik - a_il d_jk - a_jk d_il) / 2`` on ``i<j, k<l``.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    rows, cols = _pair_arrays(n)
    eye = np.eye(n)
    i, j = rows[:, None], cols[:, None]
    k, l = rows[None, :], cols[None, :]
    out = 0.5 * (A[..., i, k] * eye[j, l] + A[..., j, l] * eye[i, k]
                 - A[..., i, l] * eye[j, k] - A[..., j, k] * eye[i, l])
    return np.ascontiguousarray(out)


def decompose_mat(mat):
    """Scalar, traceless-Ricci and Weyl parts of a Lambda^2 matrix (batched).

    Returns ``(R_I, R_Ric0, W, lambda_bar, ric0)``.
    """
    mat = np.asarray(mat, dtype=float)
    N = mat.shape[-1]
    n = dim_from_N(N)
    if n < 4:
        raise UnsupportedDimensionError(f"irreducible decomposition needs n >= 4, got n={n}")
    ric = ricci_t(mat_to_tensor(mat))
    lam = np.trace(ric, axis1=-2, axis2=-1) / n
    ric0 = ric - lam[..., None, None] * np.eye(n)
    r_i = (lam / (n - 1))[..., None, None] * identity_mat(n)
    r_ric0 = (2.0 / (n - 2)) * wedge_with_id_mat(ric0)
    w = mat - r_i - r_ric0
    return r_i, r_ric0, w, lam, ric0


# ----------------------------------------------------------------------------
# value types
# ----------------------------------------------------------------------------

def _as_symmetric(mat):
    mat = np.array(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidArgumentError(f"operator matrix must be square, got {mat.shape}")
    mat = 0.5 * (mat + mat.T)
    mat.setflags(write=False)
    return mat


@dataclass(frozen=True, eq=False)
class CurvatureOperator:
    """Symmetric endomorphism of Lambda^2 R^n satisfying the first Bianchi identity.

    Construction symmetrizes ``mat``; use :meth:`from_matrix` to additionally
    validate Bianchi.
    """

    n: int
    mat: np.ndarray

    def __post_init__(self):
        mat = _as_symmetric(self.mat)
        if dim_from_N(mat.shape[0]) != self.n:
            raise InvalidArgumentError(
                f"matrix of size {mat.shape[0]} does not match n={self.n}")
        object.__setattr__(self, "mat", mat)

    @classmethod
    def from_matrix(cls, mat, check=True):
        mat = _as_symmetric(mat)
        R = cls(dim_from_N(mat.shape[0]), mat)
        if check:
            R.check_bianchi()
        return R

    @classmethod
    def zero(cls, n):
        N = n * (n - 1) // 2
        return cls(n, np.zeros((N, N)))

    @classmethod
    def identity(cls, n):
        return cls(n, identity_mat(n))

    @property
    def N(self):
        return self.mat.shape[0]

    @cached_property
    def tensor(self):
        T = mat_to_tensor(self.mat)
        T.setflags(write=False)
        return T

    def bianchi_residual(self):
        """Relative size of ``R_ijkl + R_jkil + R_kijl``."""
        T = self.tensor
        b = T + np.einsum("jkil->ijkl", T) + np.einsum("kijl->ijkl", T)
        scale = max(float(np.max(np.abs(T))), np.finfo(float).tiny)
        return float(np.max(np.abs(b))) / scale

    def check_bianchi(self, tol=BIANCHI_TOL):
        res = self.bianchi_residual()
        if res > tol:
            raise InvalidArgumentError(f"first Bianchi identity violated (relative residual {res:.3e})")
        return self

    # linear structure ---------------------------------------------------

    def _same(self, other):
        if not isinstance(other, CurvatureOperator):
            return NotImplemented
        if other.n != self.n:
            raise InvalidArgumentError(f"dimension mismatch: n={self.n} vs n={other.n}")
        return other

    def __add__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return CurvatureOperator(self.n, self.mat + other.mat)

    def __sub__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return CurvatureOperator(self.n, self.mat - other.mat)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return CurvatureOperator(self.n, float(c) * self.mat)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / float(c))

    def __neg__(self):
        return CurvatureOperator(self.n, -self.mat)

    def inner(self, other):
        """``<R, S> = tr(RS)``, equal to ``sum(R_ijkl S_ijkl) / 4``."""
        other = self._same(other)
        return float(np.einsum("pq,pq->", self.mat, other.mat))

    def norm(self):
        return float(np.linalg.norm(self.mat))

    def compose(self, other):
        """Composition ``R S`` as endomorphisms of Lambda^2 (not a curvature operator in general)."""
        other = self._same(other)
        return self.mat @ other.mat

    def allclose(self, other, rtol=1e-12, atol=0.0):
        other = self._same(other)
        scale = max(self.norm(), other.norm())
        return float(np.linalg.norm(self.mat - other.mat)) <= atol + rtol * scale

    def __repr__(self):
        return f"CurvatureOperator(n={self.n}, norm={self.norm():.6g})"


@dataclass(frozen=True)
class DecompositionParts:
    scalar_part: CurvatureOperator
    ric0_part: CurvatureOperator
    weyl_part: CurvatureOperator
    lambda_bar: float
    ric0: np.ndarray

    @property
    def part_norms(self):
        return (self.scalar_part.norm(), self.ric0_part.norm(), self.weyl_part.norm())

    @property
    def ric0_norm(self):
        return float(np.linalg.norm(self.ric0))

    def reassemble(self):
        return self.scalar_part + self.ric0_part + self.weyl_part


# ----------------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------------

def _check_sym(A, name):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"{name} must be a square matrix, got {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * scale:
        raise InvalidArgumentError(f"{name} is not symmetric")
    return A


def wedge(A, B):
    """Curvature operator ``A ^ B`` of two symmetric endomorphisms."""
    A = _check_sym(A, "A")
    B = _check_sym(B, "B")
    if A.shape != B.shape:
        raise InvalidArgumentError(f"dimension mismatch {A.shape} vs {B.shape}")
    return CurvatureOperator(A.shape[0], tensor_to_mat(wedge_t(A, B)))


def from_tensor(T, tol=BIANCHI_TOL):
    """Build an operator from ``R_ijkl``, validating every curvature symmetry."""
    T = np.asarray(T, dtype=float)
    if T.ndim != 4 or len(set(T.shape)) != 1:
        raise InvalidArgumentError(f"expected an n^4 array, got shape {T.shape}")
    scale = max(float(np.max(np.abs(T))), np.finfo(float).tiny)
    checks = {
        "antisymmetry in the first pair": T + T.transpose(1, 0, 2, 3),
        "antisymmetry in the second pair": T + T.transpose(0, 1, 3, 2),
        "pair-exchange symmetry": T - T.transpose(2, 3, 0, 1),
        "first Bianchi identity": T + np.einsum("jkil->ijkl", T) + np.einsum("kijl->ijkl", T),
    }
    for label, resid in checks.items():
        if np.max(np.abs(resid)) > tol * scale:
            raise InvalidArgumentError(f"tensor violates {label}")
    return CurvatureOperator(T.shape[0], tensor_to_mat(T))


def to_tensor(R):
    return np.array(R.tensor)


def ricci(R):
    return ricci_t(R.tensor)


def scalar(R):
    return float(np.trace(ricci(R)))


def lambda_bar(R):
    return scalar(R) / R.n


def decompose(R):
    """Orthogonal split ``R = R_I + R_Ric0 + W``."""
    r_i, r_ric0, w, lam, ric0 = decompose_mat(R.mat)
    return DecompositionParts(
        CurvatureOperator(R.n, r_i),
        CurvatureOperator(R.n, r_ric0),
        CurvatureOperator(R.n, w),
        float(lam),
        ric0,
    )


def part_norms_sq(R):
    """``(||R_I||^2, ||R_Ric0||^2, ||W||^2)`` via closed forms in lambda_bar and Ric0."""
    n = R.n
    if n < 4:
        raise UnsupportedDimensionError(f"irreducible decomposition needs n >= 4, got n={n}")
    ric = ricci(R)
    lam = np.trace(ric) / n
    ric0_sq = float(np.sum(ric * ric)) - n * lam * lam
    ri = n / (2.0 * (n - 1)) * lam * lam
    rr = ric0_sq / (n - 2)
    w = float(np.sum(R.mat * R.mat)) - ri - rr
    return ri, rr, max(w, 0.0)


def rotate(R, sigma):
    """Pull back by ``sigma``: ``(sigma R)(x, y, z, w) = R(sigma x, sigma y, sigma z, sigma w)``."""
    sigma = np.asarray(sigma, dtype=float)
    n = R.n
    if sigma.shape != (n, n):
        raise InvalidArgumentError(f"sigma must be {n}x{n}, got {sigma.shape}")
    if np.max(np.abs(sigma.T @ sigma - np.eye(n))) > ORTHO_TOL:
        raise InvalidArgumentError("sigma is not orthogonal")
    # sigma e_i = sum_a sigma[a, i] e_a
    T = np.einsum("abcd,ai,bj,ck,dl->ijkl", R.tensor, sigma, sigma, sigma, sigma, optimize=True)
    return CurvatureOperator(n, tensor_to_mat(T))


# ----------------------------------------------------------------------------
# random generation
# ----------------------------------------------------------------------------

def random_traceless(n, rng):
    """Gaussian traceless symmetric matrix with unit Frobenius norm."""
    for _ in range(100):
        A = rng.standard_normal((n, n))
        A = A + A.T
        A -= np.trace(A) / n * np.eye(n)
        nrm = np.linalg.norm(A)
        if nrm > 1e-8:
            return A / nrm
    raise RuntimeError("could not draw a non-degenerate traceless matrix")


def weyl_from_gaussian(G):
    """Weyl part of the Bianchi projection of ``G + G^T`` and its norm (batched)."""
    G = G + G.swapaxes(-1, -2)
    _, _, w, _, _ = decompose_mat(bianchi_project_mat(G))
    return w, np.linalg.norm(w, axis=(-2, -1))


def random_weyl_mat(n, rng):
    """Unit-norm Weyl-type operator: Bianchi projection of a Gaussian pair-symmetric tensor with Ricci parts removed."""
    if n < 4:
        raise UnsupportedDimensionError(f"Weyl space is trivial for n={n}")
    N = n * (n - 1) // 2
    for _ in range(100):
        w, nrm = weyl_from_gaussian(rng.standard_normal((N, N)))
        if nrm > 1e-8:
            return w / nrm
    raise RuntimeError("could not draw a non-degenerate Weyl direction")


def random_weyl_batch(n, rngs):
    """``random_weyl_mat`` for one generator per sample, projected in one batch."""
    N = n * (n - 1) // 2
    w, nrm = weyl_from_gaussian(np.stack([r.standard_normal((N, N)) for r in rngs]))
    for b in np.flatnonzero(nrm <= 1e-8):
        # same continuation as the scalar path: keep drawing from that stream
        w[b], nrm[b] = random_weyl_mat(n, rngs[b]), 1.0
    return w / nrm[:, None, None]


def ricci_type_mat(ric0):
    """``(2/(n-2)) Ric0 ^ id``: the traceless-Ricci part with traceless Ricci tensor ``ric0``."""
    n = np.shape(ric0)[-1]
    return (2.0 / (n - 2)) * wedge_with_id_mat(ric0)


def random_curvature(n, seed, spec=(1.0, 1.0, 1.0), rng=None):
    """Random operator with prescribed part norms ``(||R_I||, ||R_Ric0||, ||W||)``.

    Deterministic in ``seed``; pass ``rng`` to draw from an existing stream instead.
    """
    if int(n) != n or n < 4:
        raise UnsupportedDimensionError(f"random_curvature needs n >= 4, got {n}")
    s_i, s_r, s_w = (float(x) for x in spec)
    if min(s_i, s_r, s_w) < 0:
        raise InvalidArgumentError(f"component norms must be >= 0, got {spec}")
    if rng is None:
        rng = substream(seed, "random_curvature", n)
    N = n * (n - 1) // 2
    mat = (s_i / np.sqrt(N)) * identity_mat(n)
    if s_r > 0:
        ric0 = random_traceless(n, rng) * np.sqrt(n - 2)   # ||(2/(n-2)) ric0 ^ id|| = 1
        mat = mat + s_r * ricci_type_mat(ric0)
    if s_w > 0:
        mat = mat + s_w * random_weyl_mat(n, rng)
    return CurvatureOperator(n, mat)


def random_orthogonal(n, rng):
    """Haar-distributed orthogonal matrix."""
    Z = rng.standard_normal((n, n))
    Q, Rr = np.linalg.qr(Z)
    return Q * np.sign(np.diag(Rr))
