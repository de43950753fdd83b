"""Catalogue of algebraic identities and inequalities for curvature operators.

Every entry compares two evaluations that do not share intermediate results:
the left side goes through :mod:`curvcone.hamilton` (``Q``, the sharp product,
``tri``), the right side through the irreducible decomposition and wedge
products of Ricci tensors.  Residuals are divided by ``||R||^d`` with ``d`` the
homogeneity degree of the relation.

Random inputs are drawn in chunks of 256 per dimension from streams keyed by
``(seed, name, n, chunk)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .curvature import (CurvatureOperator, decompose_mat, dim_from_N, identity_mat, mat_to_tensor,
                        ricci_t, ricci_type_mat, tensor_to_mat, wedge_t, weyl_from_gaussian)
from .errors import InvalidArgumentError, UnsupportedError
from .hamilton import pair_layout, q_mat, sharp_t
from .rng import substream

CHUNK = 256
IDENTITY_TOL = 1e-10
INEQUALITY_TOL = 1e-11
DEFAULT_DIMS = tuple(range(4, 11))


@dataclass
class CheckResult:
    name: str
    kind: str                 # "identity" or "inequality"
    trials: int               # per dimension
    dims: tuple
    seed: int
    value: float              # max residual or min slack
    tolerance: float
    witness: object           # worst input
    witness_dim: int
    per_dim: dict = field(default_factory=dict)
    control: float = None     # negative-control residual, when the entry has one

    @property
    def max_residual(self):
        return self.value if self.kind == "identity" else None

    @property
    def min_slack(self):
        return self.value if self.kind == "inequality" else None

    @property
    def passed(self):
        if self.kind == "identity":
            return self.value <= self.tolerance and (self.control is None or self.control > 1e-6)
        return self.value >= -self.tolerance


# ----------------------------------------------------------------------------
# batched sampling
# ----------------------------------------------------------------------------

def _fro(x):
    return np.sqrt(np.sum(x * x, axis=(-2, -1)))


def _dot(x, y):
    return np.sum(x * y, axis=(-2, -1))


def _traceless(rng, size, m):
    G = rng.standard_normal((size, m, m))
    G = G + G.swapaxes(-1, -2)
    G -= (np.trace(G, axis1=-2, axis2=-1) / m)[:, None, None] * np.eye(m)
    return G / _fro(G)[:, None, None]


def _weyl(rng, size, n):
    N = n * (n - 1) // 2
    w, nrm = weyl_from_gaussian(rng.standard_normal((size, N, N)))
    return w / nrm[:, None, None]


def _operators(n, rng, size, scalar=True, ricci=True, weyl=True):
    """Random operators with independently scaled parts and an overall scale in ``[1e-2, 1e2]``."""
    N = n * (n - 1) // 2
    mats = np.zeros((size, N, N))
    if scalar:
        mats += (rng.standard_normal(size) / math.sqrt(N))[:, None, None] * identity_mat(n)
    if ricci:
        u = _traceless(rng, size, n) * math.sqrt(n - 2)
        mats += rng.standard_normal(size)[:, None, None] * ricci_type_mat(u)
    if weyl:
        mats += rng.standard_normal(size)[:, None, None] * _weyl(rng, size, n)
    return (10.0 ** rng.uniform(-2, 2, size))[:, None, None] * mats


def _b(x):
    """Broadcast a per-sample scalar over a 4-tensor."""
    return x[:, None, None, None, None]


def _ricci_data(mats):
    n = dim_from_N(mats.shape[-1])
    T = mat_to_tensor(mats)
    ric = ricci_t(T)
    lam = np.trace(ric, axis1=-2, axis2=-1) / n
    eye = np.eye(n)
    r0 = ric - lam[:, None, None] * eye
    r0sq = r0 @ r0
    nr = np.trace(r0sq, axis1=-2, axis2=-1)
    r0sq0 = r0sq - (nr / n)[:, None, None] * eye
    return n, T, ric, lam, r0, r0sq0, nr


def _q_of_weyl_pairing(w):
    """``<Q(W), W> = tr W^3 + <W#, W>`` in the pair layout."""
    A = pair_layout(w)
    return _dot(w @ w, w) + 0.5 * np.sum((A @ A.swapaxes(-1, -2)) * A, axis=(-2, -1))


# ----------------------------------------------------------------------------
# identities: each returns (relative residuals, inputs)
# ----------------------------------------------------------------------------

def _bw_ric(n, rng, size):
    R = _operators(n, rng, size)
    T = mat_to_tensor(R)
    eye = np.eye(n)
    lhs = R + tensor_to_mat(sharp_t(T, wedge_t(eye, eye)))
    rhs = tensor_to_mat(wedge_t(ricci_t(T), eye))
    return _fro(lhs - rhs) / _fro(R), R


def _ricci_type_q_rhs(n, lam, r0, r0sq0, nr):
    eye = np.eye(n)
    T = (wedge_t(r0, r0) / (n - 2)
         + _b(2 * lam / (n - 1)) * wedge_t(r0, eye)
         - 2 / (n - 2) ** 2 * wedge_t(r0sq0, eye))
    return tensor_to_mat(T) + (lam ** 2 / (n - 1) + nr / (n * (n - 2)))[:, None, None] * identity_mat(n)


def _ricci_type_q(n, rng, size, control=False):
    R = _operators(n, rng, size, weyl=control)
    _, _, _, lam, r0, r0sq0, nr = _ricci_data(R)
    Q = q_mat(R)
    return _fro(Q - _ricci_type_q_rhs(n, lam, r0, r0sq0, nr)) / _fro(R) ** 2, R


def _ricci_type_q_weyl(n, rng, size, control=False):
    R = _operators(n, rng, size, weyl=control)
    _, _, _, _, r0, _, _ = _ricci_data(R)
    w_q = decompose_mat(q_mat(R))[2]
    w_rhs = decompose_mat(tensor_to_mat(wedge_t(r0, r0)))[2] / (n - 2)
    return _fro(w_q - w_rhs) / _fro(R) ** 2, R


def _ricci_type_q_ric(n, rng, size, control=False):
    R = _operators(n, rng, size, weyl=control)
    _, _, _, lam, r0, r0sq0, nr = _ricci_data(R)
    ric_q = ricci_t(mat_to_tensor(q_mat(R)))
    rhs = (-2 / (n - 2) * r0sq0 + ((n - 2) / (n - 1) * lam)[:, None, None] * r0
           + (lam ** 2 + nr / n)[:, None, None] * np.eye(n))
    return _fro(ric_q - rhs) / _fro(R) ** 2, R


def _huisken_tri(n, rng, size):
    R = _operators(n, rng, size)
    T = mat_to_tensor(R)
    # tri(R, R, R) / 2 = <R R + R # R, R>
    lhs = _dot(R @ R + tensor_to_mat(sharp_t(T, T)), R)
    _, _, _, lam, r0, r0sq0, nr = _ricci_data(R)
    W = decompose_mat(R)[2]
    rhs = (n / (2 * (n - 1)) * lam ** 3 + 3 / (2 * (n - 1)) * lam * nr
           + 3 / (n - 2) * _dot(tensor_to_mat(wedge_t(r0, r0)), W)
           - 2 / (n - 2) ** 2 * _dot(r0sq0, r0)
           + _q_of_weyl_pairing(W))
    return np.abs(lhs - rhs) / _fro(R) ** 3, R


def _ric_qr_pairing(n, rng, size):
    R = _operators(n, rng, size)
    _, _, ric, lam, r0, r0sq0, nr = _ricci_data(R)
    lhs = _dot(ric, ricci_t(mat_to_tensor(q_mat(R))))
    mid = 2 * _dot(R, tensor_to_mat(wedge_t(ric, ric)))
    W = decompose_mat(R)[2]
    rhs = (n * lam ** 3 + (2 * n - 3) / (n - 1) * lam * nr - 2 / (n - 2) * _dot(r0, r0sq0)
           + 2 * _dot(W, tensor_to_mat(wedge_t(r0, r0))))
    return np.maximum(np.abs(lhs - mid), np.abs(lhs - rhs)) / _fro(R) ** 3, R


_PARTS = {"I": (True, False, False), "Ric0": (False, True, False), "W": (False, False, True)}
_Q_BLOCK_CASES = (
    ("I", "I", {"I"}),
    ("I", "Ric0", {"Ric0"}),
    ("I", "W", set()),
    ("W", "W", {"W"}),
    ("Ric0", "W", {"Ric0"}),
)


def _q_block_case(n, rng, size, left, right, allowed):
    R = _operators(n, rng, size, *_PARTS[left])
    S = _operators(n, rng, size, *_PARTS[right])
    QRS = 0.5 * (R @ S + S @ R) + tensor_to_mat(sharp_t(mat_to_tensor(R), mat_to_tensor(S)))
    parts = dict(zip(("I", "Ric0", "W"), decompose_mat(QRS)[:3]))
    outside = sum((_fro(p) ** 2 for k, p in parts.items() if k not in allowed), np.zeros(size))
    return np.sqrt(outside) / (_fro(R) * _fro(S)), R


def _q_block(n, rng, size, control=False):
    if control:
        return _q_block_case(n, rng, size, "Ric0", "Ric0", {"Ric0"})
    res, inputs = zip(*(_q_block_case(n, rng, size, *case) for case in _Q_BLOCK_CASES))
    res = np.stack(res)
    worst = np.argmax(res, axis=0)
    return res.max(axis=0), np.stack(inputs)[worst, np.arange(size)]


IDENTITIES = {
    "bw_ric": (_bw_ric, False),
    "ricci_type_q": (_ricci_type_q, True),
    "ricci_type_q_weyl": (_ricci_type_q_weyl, True),
    "ricci_type_q_ric": (_ricci_type_q_ric, True),
    "huisken_tri": (_huisken_tri, False),
    "ric_qr_pairing": (_ric_qr_pairing, False),
    "q_block": (_q_block, True),
}


# ----------------------------------------------------------------------------
# inequalities: each returns (relative slacks, inputs)
# ----------------------------------------------------------------------------

def tracefree_witness(m):
    """Diagonal extremal for ``|tr T^3| <= (m-2)/sqrt(m(m-1)) |T|^3`` at unit norm."""
    if int(m) != m or m < 2:
        raise InvalidArgumentError(f"size must be an integer >= 2, got {m!r}")
    d = np.full(m, -1.0 / math.sqrt(m * (m - 1)))
    d[-1] = math.sqrt((m - 1) / m)
    return np.diag(d)


def _traceless_stress(m, rng, size):
    """Half Gaussian, half small perturbations of the extremal spectrum."""
    T = _traceless(rng, size, m)
    half = size // 2
    noise = _traceless(rng, half, m) * 10.0 ** rng.uniform(-8, -2, half)[:, None, None]
    near = tracefree_witness(m) + noise
    T[:half] = near / _fro(near)[:, None, None]
    return T * (10.0 ** rng.uniform(-2, 2, size))[:, None, None]


def _tracefree_eigen(m, rng, size):
    T = _traceless_stress(m, rng, size)
    ev = np.linalg.eigvalsh(T)
    nrm2 = _fro(T) ** 2
    return ((m - 1) / m * nrm2 - np.max(ev ** 2, axis=-1)) / nrm2, T


def _tracefree_cubic(m, rng, size):
    T = _traceless_stress(m, rng, size)
    ev = np.linalg.eigvalsh(T)
    nrm = _fro(T)
    bound = (m - 2) / math.sqrt(m * (m - 1)) * nrm ** 3
    return (bound - np.abs(np.sum(ev ** 3, axis=-1))) / nrm ** 3, T


def _ric0_wedge_weyl(n, rng, size):
    r0 = _traceless(rng, size, n) * (10.0 ** rng.uniform(-2, 2, size))[:, None, None]
    W = _weyl(rng, size, n)
    # half of the Weyl directions are aligned with (Ric0 ^ Ric0)_W, where the bound is nearly tight
    half = size // 2
    aligned = decompose_mat(tensor_to_mat(wedge_t(r0[:half], r0[:half])))[2]
    aligned = aligned / _fro(aligned)[:, None, None] + 1e-3 * W[:half]
    W[:half] = aligned / _fro(aligned)[:, None, None]
    W *= (10.0 ** rng.uniform(-2, 2, size))[:, None, None]
    pairing = _dot(tensor_to_mat(wedge_t(r0, r0)), W)
    scale = _fro(W) * _fro(r0) ** 2
    slack = math.sqrt((n - 2) / (2 * (n - 1))) * scale - np.abs(pairing)
    inputs = ricci_type_mat(r0) + W
    return np.divide(slack, scale, out=np.zeros(size), where=scale > 0), inputs


def qw_constant(n):
    """Constant ``C`` in ``|<Q(W), W>| <= C ||W||^3``; sharper ``sqrt(6)/2`` when ``n = 4``."""
    if n == 4:
        return math.sqrt(6) / 2
    return math.sqrt((n * n - 1) * (n - 2) / n)


def self_dual_weyl4():
    """Unit ``W+`` on R^4 with spectrum proportional to ``(2, -1, -1)`` on self-dual bivectors.

    This is where the dimension-4 bound is attained.
    """
    s = 1 / math.sqrt(2)
    # basis order e12, e13, e14, e23, e24, e34
    phi = np.array([[s, 0, 0, 0, 0, s],
                    [0, s, 0, 0, -s, 0],
                    [0, 0, s, s, 0, 0]])
    W = phi.T @ np.diag([2.0, -1.0, -1.0]) @ phi
    return W / np.linalg.norm(W)


def _structured_weyl(n, rng, size):
    """Weyl parts of product-of-spheres operators, a region where ``<Q(W), W>`` is large."""
    out = []
    for _ in range(size):
        k = int(rng.integers(2, n - 1))
        d = np.zeros(n)
        d[:k] = 1.0
        P = np.diag(d)
        Qm = np.eye(n) - P
        w = decompose_mat(tensor_to_mat(wedge_t(P, P) + wedge_t(Qm, Qm)))[2]
        out.append(w / np.linalg.norm(w))
    return np.stack(out)


def _qw_cubic(n, rng, size):
    W = _weyl(rng, size, n)
    third = size // 3
    base = np.broadcast_to(self_dual_weyl4(), (third, 6, 6)) if n == 4 else _structured_weyl(n, rng, third)
    near = base + 10.0 ** rng.uniform(-8, -2, third)[:, None, None] * W[:third]
    W[:third] = near / _fro(near)[:, None, None]
    W *= (10.0 ** rng.uniform(-2, 2, size))[:, None, None]
    nrm3 = _fro(W) ** 3
    pairing = _dot(q_mat(W), W)
    return (qw_constant(n) * nrm3 - np.abs(pairing)) / nrm3, W


INEQUALITIES = {
    "tracefree_eigen": _tracefree_eigen,
    "tracefree_cubic": _tracefree_cubic,
    "ric0_wedge_weyl": _ric0_wedge_weyl,
    "qw_cubic": _qw_cubic,
}


# ----------------------------------------------------------------------------
# drivers
# ----------------------------------------------------------------------------

def _check_trials(trials):
    if int(trials) != trials or trials < 1:
        raise InvalidArgumentError(f"trials must be a positive integer, got {trials}")
    return int(trials)


def _chunks(trials):
    return [(c, min(CHUNK, trials - c * CHUNK)) for c in range((trials + CHUNK - 1) // CHUNK)]


_MATRIX_INPUTS = {"tracefree_eigen", "tracefree_cubic"}


def _as_witness(name, x, n):
    if name in _MATRIX_INPUTS:
        return np.array(x)
    return CurvatureOperator(n, x)


def verify_identity(name, trials, seed=0, dims=DEFAULT_DIMS):
    """Largest relative residual of a catalogued identity over random inputs."""
    if name not in IDENTITIES:
        raise InvalidArgumentError(f"unknown identity {name!r}; catalogue: {', '.join(IDENTITIES)}")
    trials = _check_trials(trials)
    fn, has_control = IDENTITIES[name]
    worst, witness, witness_dim, per_dim, control = -1.0, None, None, {}, math.inf
    for n in dims:
        best_n = -1.0
        for c, size in _chunks(trials):
            res, inputs = fn(n, substream(seed, name, n, c), size)
            k = int(np.argmax(res))
            best_n = max(best_n, float(res[k]))
            if res[k] > worst:
                worst, witness, witness_dim = float(res[k]), inputs[k], n
        per_dim[n] = best_n
        if has_control:
            ctrl, _ = fn(n, substream(seed, name, "control", n), min(trials, 32), control=True)
            control = min(control, float(np.max(ctrl)))
    return CheckResult(name, "identity", trials, tuple(dims), int(seed), worst, IDENTITY_TOL,
                       _as_witness(name, witness, witness_dim), witness_dim, per_dim,
                       control if has_control else None)


def verify_inequality(name, trials, seed=0, dims=DEFAULT_DIMS):
    """Smallest relative slack of a catalogued inequality over random and near-extremal inputs.

    For the trace-free estimates ``dims`` are matrix sizes ``m``.
    """
    if name not in INEQUALITIES:
        raise InvalidArgumentError(f"unknown inequality {name!r}; catalogue: {', '.join(INEQUALITIES)}")
    trials = _check_trials(trials)
    fn = INEQUALITIES[name]
    lowest, witness, witness_dim, per_dim = math.inf, None, None, {}
    for n in dims:
        low_n = math.inf
        for c, size in _chunks(trials):
            slack, inputs = fn(n, substream(seed, name, n, c), size)
            k = int(np.argmin(slack))
            low_n = min(low_n, float(slack[k]))
            if slack[k] < lowest:
                lowest, witness, witness_dim = float(slack[k]), inputs[k], n
        per_dim[n] = low_n
    return CheckResult(name, "inequality", trials, tuple(dims), int(seed), lowest, INEQUALITY_TOL,
                       _as_witness(name, witness, witness_dim), witness_dim, per_dim)


def equality_witness(name, size):
    """Input attaining equality in a catalogued inequality."""
    if name != "tracefree_cubic":
        raise UnsupportedError(f"{name!r} has no stated equality case; only 'tracefree_cubic' does")
    return tracefree_witness(size)


def tracefree_cubic_slack(T):
    """``(m-2)/sqrt(m(m-1)) |T|^3 - |tr T^3|`` for one traceless symmetric ``T``."""
    T = np.asarray(T, dtype=float)
    m = T.shape[0]
    ev = np.linalg.eigvalsh(T)
    return (m - 2) / math.sqrt(m * (m - 1)) * np.linalg.norm(T) ** 3 - abs(float(np.sum(ev ** 3)))
