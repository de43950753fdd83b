"""Kähler curvature operators and their circle-bundle lift.

Storage is the real 4-tensor on ``R^{2m}`` with ``J e_i = e_{m+i}``.  The
complex components ``K(E_i, conj E_j, E_k, conj E_l)`` in the unitary frame
``E_i = (e_i - sqrt(-1) J e_i)/sqrt(2)`` are a derived view; :func:`star`
builds operators from them and :func:`complex_components` reads them back.

The lift lives on ``R^{2m+1}`` with the fiber direction appended as the last
index.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .cones import ConeSpec, epsilon_n, member, resolve_a, slack_mat
from .curvature import (CurvatureOperator, decompose_mat, mat_to_tensor, random_curvature,
                        ricci_t, tensor_to_mat)
from .errors import DomainError, InvalidArgumentError, UnsupportedDimensionError
from .rng import substream

KAHLER_TOL = 1e-12
BUNDLE_TOL = 1e-11


# ----------------------------------------------------------------------------
# frames
# ----------------------------------------------------------------------------

def _check_m(m, low=1):
    if int(m) != m or m < low:
        raise UnsupportedDimensionError(f"need integer m >= {low}, got {m!r}")
    return int(m)


@lru_cache(maxsize=None)
def j_matrix(m):
    """Block complex structure ``[[0, -I], [I, 0]]``."""
    J = np.zeros((2 * m, 2 * m))
    J[m:, :m] = np.eye(m)
    J[:m, m:] = -np.eye(m)
    J.setflags(write=False)
    return J


@lru_cache(maxsize=None)
def _unitary_frame(m):
    """Columns ``E_i = (e_i - i e_{m+i}) / sqrt(2)``."""
    F = np.zeros((2 * m, m), dtype=complex)
    F[:m] = np.eye(m)
    F[m:] = -1j * np.eye(m)
    F /= math.sqrt(2)
    F.setflags(write=False)
    return F


@lru_cache(maxsize=None)
def _real_from_frame(m):
    """``P[a, c]`` with ``e_a = sum_c P[a, c] Z_c`` and ``Z = (E_1..E_m, conj E_1..conj E_m)``."""
    s = 1 / math.sqrt(2)
    P = np.zeros((2 * m, 2 * m), dtype=complex)
    I = np.eye(m)
    P[:m, :m] = s * I
    P[:m, m:] = s * I
    P[m:, :m] = 1j * s * I
    P[m:, m:] = -1j * s * I
    P.setflags(write=False)
    return P


def _tensor_from_components(C):
    """Real tensor from the ``(i, j-bar, k, l-bar)`` components of a Kähler tensor."""
    m = C.shape[0]
    full = np.zeros((2 * m,) * 4, dtype=complex)
    h, b = slice(0, m), slice(m, 2 * m)
    full[h, b, h, b] = C
    full[b, h, h, b] = -C.transpose(1, 0, 2, 3)
    full[h, b, b, h] = -C.transpose(0, 1, 3, 2)
    full[b, h, b, h] = C.transpose(1, 0, 3, 2)
    P = _real_from_frame(m)
    T = np.einsum("ac,bd,ex,fy,cdxy->abef", P, P, P, P, full, optimize=True)
    return T.real, float(np.max(np.abs(T.imag), initial=0.0))


def _check_hermitian(A, m, name):
    A = np.asarray(A, dtype=complex)
    if A.shape != (m, m):
        raise InvalidArgumentError(f"{name} must be {m}x{m}, got {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    if np.max(np.abs(A - A.conj().T), initial=0.0) > 1e-12 * scale:
        raise InvalidArgumentError(f"{name} is not Hermitian")
    return 0.5 * (A + A.conj().T)


# ----------------------------------------------------------------------------
# value type
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KahlerCurvatureOperator:
    """J-invariant algebraic curvature tensor on ``R^{2m}``."""

    m: int
    tensor: np.ndarray

    def __post_init__(self):
        m = _check_m(self.m)
        T = np.array(self.tensor, dtype=float)
        if T.shape != (2 * m,) * 4:
            raise InvalidArgumentError(f"expected a ({2 * m},)*4 tensor for m={m}, got {T.shape}")
        T.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "tensor", T)

    @classmethod
    def from_tensor(cls, T, m=None, tol=KAHLER_TOL):
        """Validated constructor: curvature symmetries, Bianchi and J-invariance."""
        T = np.asarray(T, dtype=float)
        if T.ndim != 4 or len(set(T.shape)) != 1 or T.shape[0] % 2:
            raise InvalidArgumentError(f"expected an even-dimensional n^4 tensor, got {T.shape}")
        K = cls(T.shape[0] // 2 if m is None else m, T)
        K.check(tol)
        return K

    @property
    def j_matrix(self):
        return j_matrix(self.m)

    @property
    def n(self):
        return 2 * self.m

    @cached_property
    def riemannian(self):
        """The same tensor as a :class:`CurvatureOperator` on ``R^{2m}``."""
        return CurvatureOperator(self.n, tensor_to_mat(self.tensor))

    @property
    def mat(self):
        return self.riemannian.mat

    def residuals(self):
        """Relative violations of each defining symmetry."""
        T, J = self.tensor, self.j_matrix
        scale = max(float(np.max(np.abs(T))), np.finfo(float).tiny)
        TJ = np.einsum("ai,bj,abkl->ijkl", J, J, T)
        TJ2 = np.einsum("ck,dl,ijcd->ijkl", J, J, T)
        checks = {
            "antisymmetry in the first pair": T + T.transpose(1, 0, 2, 3),
            "antisymmetry in the second pair": T + T.transpose(0, 1, 3, 2),
            "pair-exchange symmetry": T - T.transpose(2, 3, 0, 1),
            "first Bianchi identity": T + np.einsum("jkil->ijkl", T) + np.einsum("kijl->ijkl", T),
            "J-invariance in the first pair": TJ - T,
            "J-invariance in the second pair": TJ2 - T,
        }
        return {k: float(np.max(np.abs(v))) / scale for k, v in checks.items()}

    def check(self, tol=KAHLER_TOL):
        for label, r in self.residuals().items():
            if r > tol:
                raise InvalidArgumentError(f"tensor violates {label} (relative residual {r:.2e})")
        return self

    def ricci(self):
        return ricci_t(self.tensor)

    @property
    def lambda_bar(self):
        return float(np.trace(self.ricci())) / self.n

    def norm(self):
        """``||K||`` with ``||K||^2 = sum K_ijkl^2 / 4``."""
        return 0.5 * float(np.linalg.norm(self.tensor))

    def __add__(self, other):
        self._same(other)
        return KahlerCurvatureOperator(self.m, self.tensor + other.tensor)

    def __sub__(self, other):
        self._same(other)
        return KahlerCurvatureOperator(self.m, self.tensor - other.tensor)

    def __mul__(self, c):
        return KahlerCurvatureOperator(self.m, float(c) * self.tensor)

    __rmul__ = __mul__

    def _same(self, other):
        if not isinstance(other, KahlerCurvatureOperator) or other.m != self.m:
            raise InvalidArgumentError("operands must be Kähler operators of equal m")

    def __repr__(self):
        return f"KahlerCurvatureOperator(m={self.m}, norm={self.norm():.6g})"


# ----------------------------------------------------------------------------
# complex view, star and E
# ----------------------------------------------------------------------------

def complex_components(K):
    """``K_{i jbar k lbar}`` as an ``m^4`` complex array."""
    F = _unitary_frame(K.m)
    Fb = F.conj()
    return np.einsum("abcd,ai,bj,ck,dl->ijkl", K.tensor, F, Fb, F, Fb, optimize=True)


def complex_norm_sq(K):
    """``sum |K_{i jbar k lbar}|^2``; equals ``||K||^2``."""
    C = complex_components(K)
    return float(np.sum(np.abs(C) ** 2))


def hermitian_ricci(K):
    """``Ric(E_i, conj E_j)``, an ``m x m`` Hermitian matrix."""
    F = _unitary_frame(K.m)
    return F.T @ K.ricci() @ F.conj()


def star(A, B):
    """Kähler operator ``A * B`` of two Hermitian ``m x m`` matrices.

    ``(A * B)_{i jbar k lbar} = -(a_ij b_kl + a_kl b_ij + a_il b_kj + a_kj b_il) / 2``.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise InvalidArgumentError(f"A must be a square matrix, got shape {A.shape}")
    m = A.shape[0]
    A = _check_hermitian(A, m, "A")
    B = _check_hermitian(B, m, "B")
    C = np.einsum("ij,kl->ijkl", A, B) + np.einsum("il,kj->ijkl", A, B)
    C = -0.5 * (C + C.transpose(2, 3, 0, 1))
    T, _ = _tensor_from_components(C)
    return KahlerCurvatureOperator(m, T)


def e_tensor(m):
    """Closed form ``E_ijkl = (d_ik d_jl - d_il d_jk + J_ik J_jl - J_il J_jk + 2 J_ij J_kl) / 2``."""
    d, J = np.eye(2 * m), j_matrix(m)
    T = (np.einsum("ik,jl->ijkl", d, d) - np.einsum("il,jk->ijkl", d, d)
         + np.einsum("ik,jl->ijkl", J, J) - np.einsum("il,jk->ijkl", J, J)
         + 2 * np.einsum("ij,kl->ijkl", J, J))
    return 0.5 * T


def e_operator(m):
    """The curvature operator ``E = id * id`` of complex projective space."""
    m = _check_m(m)
    return KahlerCurvatureOperator(m, e_tensor(m))


# ----------------------------------------------------------------------------
# U(m) decomposition
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class KahlerParts:
    k_e: KahlerCurvatureOperator
    k_ric0: KahlerCurvatureOperator
    bochner: KahlerCurvatureOperator
    lambda_bar: float
    ric0: np.ndarray          # traceless Hermitian Ricci form

    def norms_sq(self):
        return tuple(p.norm() ** 2 for p in (self.k_e, self.k_ric0, self.bochner))

    @property
    def ric0_norm_sq(self):
        """``|Ric0|_K^2``; half the real norm squared."""
        return float(np.sum(np.abs(self.ric0) ** 2))


def kahler_decompose(K):
    """``K = K_E + K_Ric0 + B`` with ``K_E = lambda/(m+1) E`` and ``K_Ric0 = 2/(m+2) Ric0 * id``."""
    m = K.m
    if m < 2:
        raise UnsupportedDimensionError(f"the Bochner part is trivial for m={m}; need m >= 2")
    lam = K.lambda_bar
    h0 = hermitian_ricci(K) - lam * np.eye(m)
    h0 = 0.5 * (h0 + h0.conj().T)
    k_e = (lam / (m + 1)) * e_operator(m)
    k_ric0 = (2.0 / (m + 2)) * star(h0, np.eye(m))
    return KahlerParts(k_e, k_ric0, K - k_e - k_ric0, lam, h0)


def unitary_to_orthogonal(U):
    """Real ``2m x 2m`` form of ``U`` in ``U(m)``; commutes with ``J``."""
    U = np.asarray(U, dtype=complex)
    return np.block([[U.real, -U.imag], [U.imag, U.real]])


def rotate_kahler(K, U):
    """Pull back by the unitary frame change ``U``."""
    s = unitary_to_orthogonal(U)
    if np.max(np.abs(s.T @ s - np.eye(K.n))) > 1e-10:
        raise InvalidArgumentError("U is not unitary")
    T = np.einsum("abcd,ai,bj,ck,dl->ijkl", K.tensor, s, s, s, s, optimize=True)
    return KahlerCurvatureOperator(K.m, T)


def random_unitary(m, rng):
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _random_generic(m, rng):
    """Kähler tensor from a Gaussian Hermitian form on ``Sym^2(C^m)``."""
    G = rng.standard_normal((m * m, m * m)) + 1j * rng.standard_normal((m * m, m * m))
    H = (G + G.conj().T).reshape(m, m, m, m)      # H[i, k, j, l]
    C = H.transpose(0, 2, 1, 3)                     # C[i, j, k, l]
    C = 0.5 * (C + C.transpose(2, 1, 0, 3))
    C = 0.5 * (C + C.transpose(0, 3, 2, 1))
    T, _ = _tensor_from_components(C)
    return KahlerCurvatureOperator(m, T)


def random_hermitian_traceless(m, rng):
    G = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    G = G + G.conj().T
    G -= np.trace(G).real / m * np.eye(m)
    return G / np.linalg.norm(G)


def random_kahler(m, rng, norms=(1.0, 1.0, 1.0)):
    """Random Kähler operator with part norms ``(||K_E||, ||K_Ric0||, ||B||)``.

    The ``E`` part has positive scalar curvature when its norm is positive.
    """
    m = _check_m(m, 2)
    s_e, s_r, s_b = (float(x) for x in norms)
    if min(s_e, s_r, s_b) < 0:
        raise InvalidArgumentError(f"part norms must be >= 0, got {norms}")
    E = e_operator(m)
    K = (s_e / E.norm()) * E
    if s_r > 0:
        R0 = star(random_hermitian_traceless(m, rng), np.eye(m))
        K = K + (s_r / R0.norm()) * R0
    if s_b > 0:
        for _ in range(100):
            B = kahler_decompose(_random_generic(m, rng)).bochner
            if B.norm() > 1e-8:
                break
        K = K + (s_b / B.norm()) * B
    return K


# ----------------------------------------------------------------------------
# circle-bundle lift
# ----------------------------------------------------------------------------

def _check_tau(tau):
    tau = float(tau)
    if not (tau > 0 and math.isfinite(tau)):
        raise InvalidArgumentError(f"tau must be positive and finite, got {tau}")
    return tau


def _assemble(base, mixed, vert):
    """Tensor on ``R^{2m+1}`` from ``R_ijkl``, ``R_ijk0`` and ``R_i0j0`` (fiber index last)."""
    n = base.shape[0]
    T = np.zeros((n + 1,) * 4)
    f = n
    T[:n, :n, :n, :n] = base
    T[:n, :n, :n, f] = mixed
    T[:n, :n, f, :n] = -mixed
    T[:n, f, :n, :n] = mixed.transpose(2, 0, 1)
    T[f, :n, :n, :n] = -mixed.transpose(2, 0, 1)
    T[:n, f, :n, f] = vert
    T[f, :n, f, :n] = vert
    T[:n, f, f, :n] = -vert
    T[f, :n, :n, f] = -vert
    return T


def lift(K, tau):
    """Curvature of the circle bundle with fiber length scale ``tau`` over ``K``.

    ``R_ijkl = K_ijkl - tau^2/4 (2 J_ij J_kl + J_ik J_jl - J_il J_jk)``,
    ``R_ijk0 = 0``, ``R_i0j0 = tau^2/4 delta_ij``.
    """
    tau = _check_tau(tau)
    J = j_matrix(K.m)
    q = tau * tau / 4
    base = K.tensor - q * (2 * np.einsum("ij,kl->ijkl", J, J) + np.einsum("ik,jl->ijkl", J, J)
                           - np.einsum("il,jk->ijkl", J, J))
    T = _assemble(base, np.zeros((K.n,) * 3), q * np.eye(K.n))
    return CurvatureOperator(K.n + 1, tensor_to_mat(T))


def lift_general(K, A, dA, t):
    """Lift for an arbitrary connection curvature ``A`` with covariant derivative ``dA[i, j, k] = A_ij,k``.

    ``A = q J``, ``dA = 0``, ``t = tau/q`` reproduces :func:`lift`.  No Bianchi
    check is made: the result is a curvature tensor only when ``A`` is closed.
    """
    n = K.n
    A = np.asarray(A, dtype=float)
    dA = np.asarray(dA, dtype=float)
    if A.shape != (n, n) or dA.shape != (n, n, n):
        raise InvalidArgumentError(f"A must be {n}x{n} and dA {n}x{n}x{n}")
    if np.max(np.abs(A + A.T)) > 1e-12 * max(1.0, np.max(np.abs(A))):
        raise InvalidArgumentError("A must be antisymmetric (A_ij = -A_ji)")
    if np.max(np.abs(dA + dA.transpose(1, 0, 2)), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(dA), initial=0.0)):
        raise InvalidArgumentError("dA must be antisymmetric in its first two indices")
    t = float(t)
    q = t * t / 4
    base = K.tensor - q * (2 * np.einsum("ij,kl->ijkl", A, A) + np.einsum("ik,jl->ijkl", A, A)
                           - np.einsum("il,jk->ijkl", A, A))
    T = _assemble(base, -0.5 * t * dA, q * A @ A.T)
    return CurvatureOperator(n + 1, tensor_to_mat(T))


# ----------------------------------------------------------------------------
# norm identities
# ----------------------------------------------------------------------------

@dataclass
class BundleIdentity:
    name: str
    lhs: float
    rhs: float
    residual: float           # |lhs - rhs| / (||K||^2 + tau^4)

    @property
    def passed(self):
        return self.residual <= BUNDLE_TOL


@dataclass
class BundleNormReport:
    m: int
    tau: float
    identities: list
    # printed form of the Ricci-part identity, with the lambda term unsquared
    printed_ricci_part_residual: float
    extra: dict = field(default_factory=dict)

    @property
    def max_residual(self):
        return max(i.residual for i in self.identities)

    @property
    def passed(self):
        return all(i.passed for i in self.identities)

    def residuals(self):
        return {i.name: i.residual for i in self.identities}


def _sq(x):
    return float(np.sum(np.abs(x) ** 2))


def bundle_norm_report(K, tau, lambda_bar_0=None):
    """Compare norms of ``lift(K, tau)`` with their closed forms in ``K`` and ``tau``.

    With ``lambda_bar_0`` the four identities specific to
    ``tau^2 = 2 lambda_0 / (m+1)`` are added; ``tau`` must then match that choice.
    """
    m = K.m
    tau = _check_tau(tau)
    parts = kahler_decompose(K)
    lam = parts.lambda_bar
    ke, kr, kb = parts.norms_sq()
    ric_k = K.ricci()
    ric0_k_sq = _sq(ric_k) - 2 * m * lam * lam
    R = lift(K, tau)
    n = 2 * m + 1
    r_i, r_r, w, lam_r, ric0_r = decompose_mat(R.mat)
    ric_r = ricci_t(R.tensor)
    t2 = tau * tau
    d = lam - (m + 1) * t2 / 2
    scale = K.norm() ** 2 + t2 * t2

    rows = [
        ("ricci_norm", _sq(ric_r), _sq(ric_k) - 2 * m * t2 * lam + (m * m + 2 * m) / 4 * t2 * t2),
        ("traceless_ricci_norm", _sq(ric0_r), ric0_k_sq + 2 * m / (2 * m + 1) * d * d),
        ("scalar_part_norm", _sq(r_i), m / (2 * m + 1) * (lam - t2 / 4) ** 2),
        ("ricci_part_norm", _sq(r_r), ((m + 2) / 2 * kr + 2 * m / (2 * m + 1) * d * d) / (2 * m - 1)),
        ("full_norm", _sq(R.mat), K.norm() ** 2 - 1.5 * m * t2 * lam + (6 * m * m + 5 * m) / 16 * t2 * t2),
        ("scalar_flat_norm", _sq(r_r) + _sq(w), kr + kb + m * (3 * m + 1) / ((m + 1) * (2 * m + 1)) * d * d),
        ("weyl_norm", _sq(w), kb + (3 * m - 4) / (2 * (2 * m - 1)) * kr
         + 3 * m * (m - 1) / ((m + 1) * (2 * m - 1)) * d * d),
    ]
    if lambda_bar_0 is not None:
        l0 = float(lambda_bar_0)
        if abs(tau - tau_from_lambda0(l0, m)) > 1e-12 * tau:
            raise InvalidArgumentError("tau does not match 2 lambda_0 / (m+1)")
        e = lam - l0
        rows += [
            ("pc_scalar_relation", float(lam_r), 2 * m / (2 * m + 1) * (lam - l0 / (2 * (m + 1)))),
            ("pc_scalar_part_norm", _sq(r_i), m * (2 * m + 1) / (4 * (m + 1) ** 2)
             * (lam * lam + 2 / (2 * m + 1) * lam * e + e * e / (2 * m + 1) ** 2)),
            ("pc_ricci_part_norm", _sq(r_r), ((m + 2) / 2 * kr + 2 * m / (2 * m + 1) * e * e) / (2 * m - 1)),
            ("pc_weyl_norm", _sq(w), kb + (3 * m - 4) / (2 * (2 * m - 1)) * kr
             + 3 * m * (m - 1) / ((m + 1) * (2 * m - 1)) * e * e),
        ]
    identities = [BundleIdentity(name, float(l), float(r), abs(l - r) / scale) for name, l, r in rows]
    printed = ((m + 2) / 2 * kr + 2 * m / (2 * m + 1) * d) / (2 * m - 1)
    report = BundleNormReport(m, tau, identities, abs(_sq(r_r) - printed) / scale)
    report.extra["weyl_floor"] = kb + (3 * m - 4) / (2 * (2 * m - 1)) * kr
    report.extra["lambda_bar_lift"] = float(lam_r)
    return report


# ----------------------------------------------------------------------------
# averaged scalar curvature and tau
# ----------------------------------------------------------------------------

@dataclass
class KahlerFieldSample:
    """Finite weighted sample standing in for a Kähler manifold.

    ``points`` holds ``(K, lambda_bar, weight)`` triples.
    """

    points: list
    lambda_bar_0: float = None

    def __post_init__(self):
        if not self.points:
            raise InvalidArgumentError("field sample needs at least one point")
        ms = {p[0].m for p in self.points}
        if len(ms) != 1:
            raise InvalidArgumentError(f"points have different m: {sorted(ms)}")
        weights = np.array([p[2] for p in self.points], dtype=float)
        if np.any(weights <= 0):
            raise InvalidArgumentError("weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidArgumentError(f"weights must sum to 1, got {weights.sum()!r}")
        for K, lam, _ in self.points:
            if abs(lam - K.lambda_bar) > 1e-12 * max(1.0, abs(lam)):
                raise InvalidArgumentError(f"lambda_bar {lam} does not match scal/(2m) = {K.lambda_bar}")
        mean = float(sum(lam * w for _, lam, w in self.points))
        if self.lambda_bar_0 is None:
            self.lambda_bar_0 = mean
        elif abs(self.lambda_bar_0 - mean) > 1e-12 * max(1.0, abs(mean)):
            raise InvalidArgumentError(f"lambda_bar_0 {self.lambda_bar_0} is not the weighted mean {mean}")

    @classmethod
    def from_operators(cls, operators, weights=None):
        """Build from operators; weights default to uniform and are normalized."""
        operators = list(operators)
        w = np.ones(len(operators)) if weights is None else np.asarray(weights, dtype=float)
        if len(w) != len(operators):
            raise InvalidArgumentError("need one weight per operator")
        if np.any(w <= 0):
            raise InvalidArgumentError("weights must be positive")
        w = w / w.sum()
        return cls([(K, K.lambda_bar, float(wi)) for K, wi in zip(operators, w)])

    @property
    def m(self):
        return self.points[0][0].m


def tau_from_lambda0(lambda_bar_0, m):
    """``tau = sqrt(2 lambda_0 / (m+1))``."""
    l0 = float(lambda_bar_0)
    if not l0 > 0:
        raise DomainError(f"the averaged scalar curvature must be positive, got lambda_0={l0}")
    return math.sqrt(2 * l0 / (m + 1))


def choose_tau(field_sample):
    return tau_from_lambda0(field_sample.lambda_bar_0, field_sample.m)


# ----------------------------------------------------------------------------
# pinching condition
# ----------------------------------------------------------------------------

def _check_pinch_params(m, a, eps, mode):
    n = 2 * m + 1
    if not (0 < eps < n / 2):
        raise InvalidArgumentError(f"eps must satisfy 0 < eps < (2m+1)/2 = {n / 2}, got {eps}")
    if mode == "theorem":
        low = n / 4 - epsilon_n(n)
        if not (low < a <= n / 4):
            raise InvalidArgumentError(
                f"theorem mode needs (2m+1)/4 - eps_(2m+1) = {low!r} < a <= (2m+1)/4 = {n / 4}, got a={a!r}")
    elif mode != "exploratory":
        raise InvalidArgumentError(f"mode must be 'theorem' or 'exploratory', got {mode!r}")


def resolve_pinch_a(value, m):
    """Like :func:`resolve_a` but ``theorem`` maps to the midpoint ``(2m+1)/4 - eps_(2m+1)/2``
    of the half-open theorem range."""
    n = 2 * m + 1
    if isinstance(value, str) and value.strip().lower() == "theorem":
        return n / 4 - epsilon_n(n) / 2
    return resolve_a(value, n)


def pinching_coefficients(m, a, eps):
    """``(c_Ric0, c_B, c_lambda, c_E)`` of the condition

    ``c_Ric0 ||K_Ric0||^2 + c_B ||B||^2 + c_lambda (lambda - lambda_0)^2 <= c_E ||K_E||^2``.
    """
    c_r = (3 * m - 4) / 8 + a
    c_b = (2 * m - 1) / 4 + a
    c_l = m / (16 * (m + 1) ** 2) * ((12 * m * m - 13) + 4 * (6 * m + 5) * a + (2 * m + 1 - 4 * a) / 2 / eps)
    c_e = (2 * m + 1 - 4 * a) / 4 * (2 * m + 1) / (8 * (m + 1)) * (1 - 2 * eps / (2 * m + 1))
    return c_r, c_b, c_l, c_e


def pinching_check(K, lambda_bar, lambda_bar_0, a, eps, mode="theorem"):
    """``(holds, slack)`` for the pinching condition; ``slack = RHS - LHS``.

    ``lambda_bar`` must equal ``scal(K)/(2m)``; pass ``None`` to take it from ``K``.
    """
    m = K.m
    a = resolve_pinch_a(a, m)
    eps = float(eps)
    _check_pinch_params(m, a, eps, mode)
    lam = K.lambda_bar if lambda_bar is None else float(lambda_bar)
    if abs(lam - K.lambda_bar) > 1e-12 * max(1.0, abs(lam)):
        raise InvalidArgumentError(f"lambda_bar {lam} does not match scal/(2m) = {K.lambda_bar}")
    if not lam > 0:
        raise InvalidArgumentError(f"lambda_bar must be positive, got {lam}")
    ke, kr, kb = kahler_decompose(K).norms_sq()
    c_r, c_b, c_l, c_e = pinching_coefficients(m, a, eps)
    d = lam - float(lambda_bar_0)
    slack = c_e * ke - (c_r * kr + c_b * kb + c_l * d * d)
    # roundoff in the split leaves ~1e-31 parts on exact K_E operators
    tol = 1e-12 * (ke + kr + kb + d * d)
    return slack >= -tol, float(slack)


def sample_pinched(m, a, eps, rng, ratio, lambda_bar=1.0):
    """Kähler operator and ``lambda_0`` whose pinching LHS equals ``ratio`` times the RHS.

    ``ratio < 1`` gives pinched operators, ``ratio > 1`` violators.  The three
    LHS terms receive random shares of the budget.
    """
    c_r, c_b, c_l, c_e = pinching_coefficients(m, a, eps)
    ke = 2 * m / (m + 1) * lambda_bar ** 2
    budget = ratio * c_e * ke
    share = rng.dirichlet(np.ones(3))
    kr, kb, dd = budget * share / np.array([c_r, c_b, c_l])
    K = random_kahler(m, rng, (math.sqrt(ke), math.sqrt(kr), math.sqrt(kb)))
    lam0 = lambda_bar - rng.choice([-1.0, 1.0]) * math.sqrt(dd)
    if lam0 <= 0:
        lam0 = lambda_bar + math.sqrt(dd)   # the averaged scalar curvature is positive
    return K, lam0


@dataclass
class PinchingConeReport:
    m: int
    a: float
    eps: float
    trials: int
    in_hypothesis: int
    out_of_hypothesis: int
    counterexamples: list
    min_cone_slack: float = math.inf       # over in-hypothesis operators
    min_scalar: float = math.inf           # lambda_bar of the lifts
    min_gap: float = math.inf              # cone slack - pinching slack, should be >= 0

    @property
    def ok(self):
        return not self.counterexamples


def pinching_implies_cone(m, a, eps, trials, seed=0, ratio_range=(0.0, 1.0), operators=None):
    """Check that pinched operators lift into ``Omega(a)`` with positive scalar curvature.

    Operators come from :func:`sample_pinched` with LHS/RHS ratios uniform in
    ``ratio_range`` unless ``operators`` (pairs ``(K, lambda_0)``) is given.
    Violators of the pinching condition are counted as out of hypothesis.
    """
    n = 2 * m + 1
    a = resolve_pinch_a(a, m)
    _check_pinch_params(m, a, eps, "theorem")
    cone = ConeSpec.omega(n, a)
    rng = substream(seed, "pinched", m)
    if operators is None:
        lo, hi = ratio_range
        operators = [sample_pinched(m, a, eps, rng, rng.uniform(lo, hi), rng.uniform(0.2, 5.0))
                     for _ in range(trials)]
    report = PinchingConeReport(m, a, eps, len(operators), 0, 0, [])
    for idx, (K, lam0) in enumerate(operators):
        holds, pslack = pinching_check(K, None, lam0, a, eps)
        if not holds:
            report.out_of_hypothesis += 1
            continue
        report.in_hypothesis += 1
        R = lift(K, tau_from_lambda0(lam0, m))
        mem = member(R, cone, tol=1e-12 * R.norm() ** 2)
        lam_r = float(np.trace(ricci_t(R.tensor))) / n
        report.min_cone_slack = min(report.min_cone_slack, mem.slack)
        report.min_scalar = min(report.min_scalar, lam_r)
        report.min_gap = min(report.min_gap, mem.slack - pslack)
        if not (mem.member and lam_r > 0):
            report.counterexamples.append({"index": idx, "cone_slack": mem.slack,
                                           "pinching_slack": pslack, "lambda_bar": lam_r})
    return report


# ----------------------------------------------------------------------------
# stability margin
# ----------------------------------------------------------------------------

def cone_margin(R, a):
    """Certified radius ``r`` with ``R' in Omega(a)`` whenever ``||R' - R|| < r``.

    With ``s`` the slack, ``G = c_I R_I - c_Ric R_Ric0 - c_W W`` and
    ``L = max(c_Ric, c_W)`` one has ``slack(R + P) >= s - 2||G|| r - L r^2`` for
    ``||P|| <= r``; scalar positivity survives while ``r < ||R_I||``.
    """
    n = R.n
    a = resolve_a(a, n)
    cone = ConeSpec.omega(n, a)
    ci, cr, cw = cone.weights()
    r_i, r_r, w, lam, _ = decompose_mat(R.mat)
    s = float(slack_mat(R.mat, cone))
    if not (s > 0 and lam > 0):
        raise DomainError(f"operator is not in the interior of Omega({a}) (slack {s:.3e}, lambda {lam:.3e})")
    g = math.sqrt(ci * ci * _sq(r_i) + cr * cr * _sq(r_r) + cw * cw * _sq(w))
    L = max(cr, cw)
    r_quad = s / (g + math.sqrt(g * g + L * s))      # = (-g + sqrt(g^2 + L s)) / L, stably
    return min(r_quad, math.sqrt(_sq(r_i)))


def probe_margin(R, a, trials, seed=0, fraction=0.99):
    """Members among ``trials`` perturbations of length ``fraction * cone_margin``.

    Directions are random unit operators plus the two worst cases for the
    bound: ``-G`` and ``-I``.  Returns ``(members, trials_run)``.
    """
    n = R.n
    a = resolve_a(a, n)
    cone = ConeSpec.omega(n, a)
    radius = fraction * cone_margin(R, a)
    ci, cr, cw = cone.weights()
    r_i, r_r, w, _, _ = decompose_mat(R.mat)
    dirs = [-(ci * r_i - cr * r_r - cw * w), -np.eye(R.N)]
    rng = substream(seed, "margin", n)
    for _ in range(max(trials - 2, 0)):
        dirs.append(random_curvature(n, 0, rng.uniform(0, 1, 3), rng=rng).mat)
    hits = 0
    for d in dirs:
        nd = np.linalg.norm(d)
        P = CurvatureOperator(n, R.mat + radius * d / nd)
        hits += member(P, cone).member
    return hits, len(dirs)
