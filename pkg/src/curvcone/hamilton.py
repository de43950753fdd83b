"""The reaction term ``Q(R) = R^2 + R#`` of the curvature evolution and its ODE.

Two evaluation routes exist for the sharp product.  :func:`sharp` contracts
4-tensors (production path).  :func:`sharp_ad` goes through the adjoint
representation, ``<R#S(phi), phi> = -tr(ad_phi R ad_phi S) / 2``, polarized
over basis bivectors; it is slow and kept as an oracle.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .curvature import CurvatureOperator, dim_from_N, mat_to_tensor, ricci_t, tensor_to_mat
from .errors import IntegrationError, InvalidArgumentError
from .so_basis import ad_matrix, signed_index_map

BLOWUP_FACTOR = 1e8


# ----------------------------------------------------------------------------
# array level (batched over leading axes)
# ----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _pair_gather(n):
    idx, sgn = signed_index_map(n)
    N = n * (n - 1) // 2
    i, k, j, l = np.meshgrid(*(np.arange(n),) * 4, indexing="ij")
    flat = (idx[i, j] * N + idx[k, l]).reshape(n * n, n * n)
    sign = (sgn[i, j] * sgn[k, l]).reshape(n * n, n * n)
    flat.setflags(write=False)
    sign.setflags(write=False)
    return flat, sign


def pair_layout(mat):
    """``A[(i,k), (j,l)] = R_ijkl`` as an ``n^2 x n^2`` matrix (batched).

    In this layout the sharp contraction is ``A A^T`` and Ricci is a sum over
    the ``(j, j)`` columns.
    """
    mat = np.asarray(mat, dtype=float)
    N = mat.shape[-1]
    flat, sign = _pair_gather(dim_from_N(N))
    return sign * np.take(mat.reshape(mat.shape[:-2] + (N * N,)), flat, axis=-1)


def _pair_contraction(TR, TS):
    """``M[i,k,j,l] = sum_pq R_ipkq S_jplq`` as one matrix product."""
    n = TR.shape[-1]
    lead = TR.shape[:-4]
    A = np.einsum("...ipkq->...ikpq", TR).reshape(lead + (n * n, n * n))
    B = np.einsum("...jplq->...jlpq", TS).reshape(TS.shape[:-4] + (n * n, n * n))
    return (A @ B.swapaxes(-1, -2)).reshape(np.broadcast_shapes(lead, TS.shape[:-4]) + (n,) * 4)


def sharp_square_t(T):
    """``R#_ijkl = sum_pq (R_ipkq R_jplq - R_iplq R_jpkq)``."""
    M = _pair_contraction(T, T)
    return np.einsum("...ikjl->...ijkl", M) - np.einsum("...iljk->...ijkl", M)


def sharp_t(TR, TS):
    """Symmetrized bilinear sharp product on 4-tensors."""
    M = _pair_contraction(TR, TS)
    P = np.einsum("...ikjl->...ijkl", M) - np.einsum("...iljk->...ijkl", M)
    P_rev = np.einsum("...jlik->...ijkl", M) - np.einsum("...jkil->...ijkl", M)
    return 0.5 * (P + P_rev)


def q_mat(mat):
    """Lambda^2 matrix of ``Q(R)`` from that of ``R`` (batched)."""
    mat = np.asarray(mat, dtype=float)
    return mat @ mat + tensor_to_mat(sharp_square_t(mat_to_tensor(mat)))


# ----------------------------------------------------------------------------
# operator level
# ----------------------------------------------------------------------------

def _check_pair(R, S):
    if R.n != S.n:
        raise InvalidArgumentError(f"dimension mismatch: n={R.n} vs n={S.n}")


def sharp(R, S):
    """``R # S`` via the tensor formula; symmetric in ``R, S``."""
    _check_pair(R, S)
    if R is S:
        return CurvatureOperator(R.n, tensor_to_mat(sharp_square_t(R.tensor)))
    return CurvatureOperator(R.n, tensor_to_mat(sharp_t(R.tensor, S.tensor)))


def sharp_ad(R, S):
    """``R # S`` through the adjoint representation (oracle path).

    The diagonal ``<R#S e_p, e_p>`` comes from the quadratic form directly and
    the off-diagonal entries from polarization, ``f(e_p + e_q) - f(e_p) - f(e_q)``.
    """
    _check_pair(R, S)
    n, N = R.n, R.N
    ads = np.stack([ad_matrix(e, n) for e in np.eye(N)])
    Rm, Sm = R.mat, S.mat

    def form(ad):
        return -0.5 * np.trace(ad @ Rm @ ad @ Sm)

    diag = np.array([form(ads[p]) for p in range(N)])
    out = np.diag(diag)
    for p in range(N):
        for q in range(p + 1, N):
            v = 0.5 * (form(ads[p] + ads[q]) - diag[p] - diag[q])
            out[p, q] = out[q, p] = v
    return CurvatureOperator(n, out)


def q_of(R):
    """``Q(R) = R^2 + R#``."""
    return CurvatureOperator(R.n, q_mat(R.mat))


def q_bilinear(R, S):
    """Polarization ``Q(R, S) = (RS + SR)/2 + R # S``."""
    _check_pair(R, S)
    comp = 0.5 * (R.mat @ S.mat + S.mat @ R.mat)
    return CurvatureOperator(R.n, comp + sharp(R, S).mat)


def tri(R, S, T):
    """Symmetric trilinear form ``tr((RS + SR + 2 R#S) T) = 2 <Q(R, S), T>``."""
    _check_pair(R, S)
    _check_pair(R, T)
    return 2.0 * q_bilinear(R, S).inner(T)


def ricci_of_q_contraction(R):
    """``sum_pq R_ipjq Ric_pq``, the closed form of ``Ric(Q(R))``."""
    T = R.tensor
    return np.einsum("ipjq,pq->ij", T, ricci_t(T))


# ----------------------------------------------------------------------------
# ODE
# ----------------------------------------------------------------------------

# Dormand-Prince 5(4)
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B_LOW


@dataclass
class OdeTrajectory:
    """Accepted samples of an integration run."""

    samples: list
    normalized: bool
    accepted: int = 0
    rejected: int = 0
    halt_reason: str = "t_end"
    monitor: list = field(default_factory=list)

    @property
    def step_control(self):
        return {"accepted": self.accepted, "rejected": self.rejected}

    @property
    def times(self):
        return np.array([t for t, _ in self.samples])

    @property
    def final(self):
        return self.samples[-1][1]


def _projective_rhs(y, shape):
    m = y.reshape(shape)
    q = q_mat(m)
    coef = np.sum(q * m) / np.sum(m * m)
    return (q - coef * m).ravel()


def _raw_rhs(y, shape):
    return q_mat(y.reshape(shape)).ravel()


def integrate(R0, t_end, normalized=False, tol=1e-10, h0=None, max_steps=200_000,
              monitor=None):
    """Integrate ``dR/dt = Q(R)`` (raw) or its projective form (normalized).

    The normalized flow is ``Q(R) - <Q(R), R>/||R||^2 R``, which conserves
    ``||R||``; after each accepted step the state is rescaled to ``||R0||`` to
    remove drift.  The raw flow stops once ``||R||`` exceeds ``1e8 ||R0||``.

    ``monitor(R)`` is evaluated at every accepted sample and stored on the
    trajectory.
    """
    if tol <= 0:
        raise InvalidArgumentError(f"tol must be positive, got {tol}")
    if t_end < 0:
        raise InvalidArgumentError(f"t_end must be >= 0, got {t_end}")
    n, shape = R0.n, R0.mat.shape
    y = np.array(R0.mat, dtype=float).ravel()
    norm0 = float(np.linalg.norm(y))
    if normalized and norm0 == 0.0:
        raise InvalidArgumentError("normalized flow needs a nonzero initial operator")
    rhs = _projective_rhs if normalized else _raw_rhs

    traj = OdeTrajectory(samples=[(0.0, R0)], normalized=normalized)
    if monitor is not None:
        traj.monitor.append(monitor(R0))

    t = 0.0
    f = rhs(y, shape)
    if h0 is None:
        fn = float(np.linalg.norm(f))
        h = 0.01 * (1.0 + norm0) / fn if fn > 0 else t_end
        h = min(h, t_end) if t_end > 0 else 0.0
    else:
        h = h0
    err_prev = 1e-4
    safety, alpha, beta = 0.9, 0.7 / 5, 0.4 / 5

    while t < t_end:
        if traj.accepted + traj.rejected >= max_steps:
            traj.halt_reason = "max_steps"
            break
        h = min(h, t_end - t)
        k = [f]
        for s in range(1, 7):
            ys = y + h * sum(a * kk for a, kk in zip(_A[s], k))
            k.append(rhs(ys, shape))
        y_new = y + h * sum(b * kk for b, kk in zip(_B, k) if b != 0.0)
        if not np.all(np.isfinite(y_new)):
            last = traj.samples[-1]
            raise IntegrationError(f"non-finite state at t={t + h:.6g}", last_good=last)
        err_vec = h * sum(e * kk for e, kk in zip(_E, k))
        scale = tol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if err <= 1.0:
            t += h
            if normalized:
                y_new *= norm0 / np.linalg.norm(y_new)
            y = y_new
            f = rhs(y, shape)  # FSAL would reuse k[6]; the rescale invalidates it
            R = CurvatureOperator(n, y.reshape(shape))
            traj.samples.append((t, R))
            traj.accepted += 1
            if monitor is not None:
                traj.monitor.append(monitor(R))
            err = max(err, 1e-10)
            fac = safety * err ** (-alpha) * err_prev ** beta
            h *= min(5.0, max(0.2, fac))
            err_prev = err
            if not normalized and np.linalg.norm(y) > BLOWUP_FACTOR * norm0:
                traj.halt_reason = "blow-up"
                break
        else:
            traj.rejected += 1
            h *= max(0.1, safety * err ** (-1 / 5))
        if h <= 1e-14 * max(1.0, abs(t)):
            last = traj.samples[-1]
            raise IntegrationError(f"step size underflow at t={t:.6g}", last_good=last)
    return traj
