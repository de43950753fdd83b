"""Pinching cones ``Omega(a)`` and ``Theta(delta)`` and the boundary invariance test.

``Omega(a)`` is cut out by the quadratic form

    (n-4a)/4 ||R_I||^2 - a ||R_Ric0||^2 - (n-2+4a)/4 ||W||^2 >= 0,   scal > 0,

whose boundary is the level set ``F = 1/(n-2+4a)`` of
``F(R) = ||R||^2 / |Ric|^2``.  The cone is invariant under ``R' = Q(R)`` as
soon as ``dF_R(Q(R)) <= 0`` on that boundary, and :func:`scan_invariance`
searches for the largest value of this derivative.
"""

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .curvature import (CurvatureOperator, bianchi_project_mat, decompose_mat, dim_from_N,
                        identity_mat, random_traceless, random_weyl_batch, random_weyl_mat, ricci_t,
                        wedge_with_id_mat)
from .errors import DomainError, InvalidArgumentError, UnsupportedDimensionError
from .hamilton import pair_layout
from .rng import substream

CHUNK = 256
DF_TOL = 1e-9
ROUNDOFF = 1e-12


# ----------------------------------------------------------------------------
# constants
# ----------------------------------------------------------------------------

def _check_n(n, low=4):
    if int(n) != n or n < low:
        raise UnsupportedDimensionError(f"need integer n >= {low}, got {n!r}")
    return int(n)


def epsilon_n_exact(n):
    """Threshold ``eps_n`` below ``n/4`` as an exact fraction."""
    n = _check_n(n)
    if n >= 11:
        return Fraction(1, n)
    return Fraction(n * n * (n - 1), 2 * (3 * n - 2) * (2 * n * n - 4 * n + 1))


def epsilon_n(n):
    return float(epsilon_n_exact(n))


def delta_n_exact(n):
    """Huisken's pinching constant ``2/((n-2)(n+1))``; ``1/10`` in dimension 5."""
    n = _check_n(n)
    if n == 5:
        return Fraction(1, 10)
    return Fraction(2, (n - 2) * (n + 1))


def delta_n(n):
    return float(delta_n_exact(n))


def resolve_a(value, n):
    """Numeric ``a`` from a number or the names ``theorem`` / ``nquarter``."""
    if isinstance(value, str):
        key = value.strip().lower()
        if key == "theorem":
            return n / 4 - epsilon_n(n)
        if key == "nquarter":
            return n / 4
        try:
            return float(key)
        except ValueError:
            raise InvalidArgumentError(
                f"a must be a number, 'theorem' or 'nquarter', got {value!r}") from None
    return float(value)


# ----------------------------------------------------------------------------
# cone descriptions
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeSpec:
    kind: str
    n: int
    param: float

    def __post_init__(self):
        if self.kind not in ("omega", "theta"):
            raise InvalidArgumentError(f"cone kind must be 'omega' or 'theta', got {self.kind!r}")
        _check_n(self.n)
        if not math.isfinite(self.param):
            raise InvalidArgumentError(f"cone parameter must be finite, got {self.param}")
        if self.kind == "omega" and not (0.0 <= self.param <= self.n / 4):
            raise InvalidArgumentError(f"Omega(a) needs 0 <= a <= n/4 = {self.n / 4}, got a={self.param}")
        if self.kind == "theta" and self.param < 0:
            raise InvalidArgumentError(f"Theta(delta) needs delta >= 0, got {self.param}")

    @classmethod
    def omega(cls, n, a):
        return cls("omega", int(n), float(a))

    @classmethod
    def theta(cls, n, delta=None):
        return cls("theta", int(n), delta_n(n) if delta is None else float(delta))

    def weights(self):
        """Coefficients ``(c_I, c_Ric, c_W)`` with ``slack = c_I|R_I|^2 - c_Ric|R_Ric0|^2 - c_W|W|^2``."""
        n, p = self.n, self.param
        if self.kind == "omega":
            return (n - 4 * p) / 4, p, (n - 2 + 4 * p) / 4
        return p, 1.0, 1.0

    def boundary_level(self):
        """``1/(n-2+4a)``, the value of ``F`` on the boundary of ``Omega(a)``."""
        if self.kind != "omega":
            raise InvalidArgumentError("only Omega(a) boundaries are level sets of F")
        return 1.0 / (self.n - 2 + 4 * self.param)

    def to_dict(self):
        return {"kind": self.kind, "n": self.n, "param": self.param}


class Membership(NamedTuple):
    member: bool
    slack: float


def _part_norms_sq_mat(mat):
    r_i, r_ric0, w, lam, _ = decompose_mat(mat)
    sq = lambda x: np.sum(x * x, axis=(-2, -1))  # noqa: E731
    return sq(r_i), sq(r_ric0), sq(w), lam


def slack_mat(mat, cone):
    """Membership slack of a batch of Lambda^2 matrices."""
    ci, cr, cw = cone.weights()
    pi, pr, pw, _ = _part_norms_sq_mat(mat)
    return ci * pi - cr * pr - cw * pw


def member(R, cone, tol=0.0):
    """``(member, slack)``; members need ``slack >= -tol`` and ``scal > 0``."""
    if R.n != cone.n:
        raise InvalidArgumentError(f"dimension mismatch: operator n={R.n}, cone n={cone.n}")
    pi, pr, pw, lam = _part_norms_sq_mat(R.mat)
    ci, cr, cw = cone.weights()
    slack = float(ci * pi - cr * pr - cw * pw)
    return Membership(bool(slack >= -tol and lam > 0), slack)


def omega_slack_ricci_form(R, a):
    """Slack of the ``|Ric|^2 / 4 - ((n-2)/4 + a) ||R||^2`` description of ``Omega(a)``.

    Equal to the decomposition slack for every operator.
    """
    ric = ricci_t(R.tensor)
    return float(0.25 * np.sum(ric * ric) - ((R.n - 2) / 4 + a) * np.sum(R.mat * R.mat))


# ----------------------------------------------------------------------------
# F and its derivative along Q
# ----------------------------------------------------------------------------

def f_and_df_mat(mat):
    """Batched ``(F, dF_R(Q(R)))`` for Lambda^2 matrices; assumes ``scal > 0``.

    Uses ``<R#, R> = sum((A A^T) * A) / 2`` and
    ``<Ric, Ric(Q(R))> = sum R_ipjq Ric_ij Ric_pq`` in the pair layout ``A``.
    """
    mat = np.ascontiguousarray(mat, dtype=float)
    n = dim_from_N(mat.shape[-1])
    A = pair_layout(mat)
    sharp_dot = 0.5 * np.sum((A @ A.swapaxes(-1, -2)) * A, axis=(-2, -1))
    r_q = np.sum((mat @ mat) * mat, axis=(-2, -1)) + sharp_dot
    ric = A[..., np.arange(n) * (n + 1)].sum(axis=-1)      # flattened Ric_(i,k)
    ric_ric_q = np.einsum("...a,...a->...", (A @ ric[..., None])[..., 0], ric)
    ric_sq = np.sum(ric * ric, axis=-1)
    F = np.sum(mat * mat, axis=(-2, -1)) / ric_sq
    return F, 2.0 / ric_sq * (r_q - F * ric_ric_q)


def f_and_df(R):
    """``F(R) = ||R||^2/|Ric|^2`` and ``dF_R(Q(R))``."""
    if np.trace(ricci_t(R.tensor)) <= 0:
        raise DomainError("F is only defined where scal > 0")
    F, dF = f_and_df_mat(R.mat)
    return float(F), float(dF)


# ----------------------------------------------------------------------------
# boundary chart
# ----------------------------------------------------------------------------

def boundary_radii(n, a, lam=1.0):
    """``(|Ric0|, ||W||)`` on ``d Omega(a)`` at ``theta = 0`` and ``theta = pi/2``."""
    ric0 = math.sqrt(n * (n - 2) * (n - 4 * a) / (8 * a * (n - 1))) * lam
    weyl = math.sqrt(n * (n - 4 * a) / (2 * (n - 1) * (n - 2 + 4 * a))) * lam
    return ric0, weyl


def _check_open_a(n, a):
    if not (0 < a < n / 4):
        raise InvalidArgumentError(
            f"boundary chart needs 0 < a < n/4, got a={a}; a=0 is Omega(0) and a=n/4 is the ray of I")


def boundary_mat(n, a, lam, theta, u, v):
    """Boundary point with unit traceless direction ``u`` and unit Weyl direction ``v`` (batched)."""
    c, d = boundary_radii(n, a, lam)
    theta = np.asarray(theta, dtype=float)
    cos, sin = np.cos(theta)[..., None, None], np.sin(theta)[..., None, None]
    return ((lam / (n - 1)) * identity_mat(n)
            + (2.0 / (n - 2)) * wedge_with_id_mat(c * cos * u)
            + d * sin * v)


def sample_boundary(n, a, seed, theta, lam=1.0, rng=None):
    """Point of ``d Omega(a)`` with random Ricci and Weyl directions."""
    n = _check_n(n)
    _check_open_a(n, a)
    if not (0.0 <= theta <= math.pi / 2):
        raise InvalidArgumentError(f"theta must lie in [0, pi/2], got {theta}")
    if lam <= 0:
        raise InvalidArgumentError(f"lambda must be positive, got {lam}")
    if rng is None:
        rng = substream(seed, "boundary", n)
    u = random_traceless(n, rng)
    v = random_weyl_mat(n, rng)
    return CurvatureOperator(n, boundary_mat(n, a, lam, theta, u, v))


def sample_member(cone, rng, lam=1.0, boundary_fraction=0.25):
    """Random member of ``cone``: a boundary point shrunk radially towards ``R_I``.

    With probability ``boundary_fraction`` the point is left on the boundary.
    """
    n = cone.n
    ci, cr, cw = cone.weights()
    ri_sq = n / (2 * (n - 1)) * lam * lam
    theta = rng.uniform(0.0, math.pi / 2)
    r = 1.0 if rng.uniform() < boundary_fraction else rng.uniform()
    u = random_traceless(n, rng)
    v = random_weyl_mat(n, rng)
    budget = ci * ri_sq
    # ||R_Ric0||^2 = |Ric0|^2/(n-2); put cr*||R_Ric0||^2 = budget cos^2, cw*||W||^2 = budget sin^2
    ric0_norm = math.sqrt((n - 2) * budget / cr) * math.cos(theta) if cr > 0 else 0.0
    w_norm = math.sqrt(budget / cw) * math.sin(theta) if cw > 0 else 0.0
    mat = ((lam / (n - 1)) * identity_mat(n)
           + (2.0 / (n - 2)) * wedge_with_id_mat(r * ric0_norm * u)
           + r * w_norm * v)
    return CurvatureOperator(n, mat)


# ----------------------------------------------------------------------------
# orthonormal bases for the ascent chart
# ----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def traceless_basis(n):
    """Frobenius-orthonormal basis of traceless symmetric ``n x n`` matrices, shape ``(k, n, n)``."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[i, j] = E[j, i] = 1 / math.sqrt(2)
            out.append(E)
    for k in range(1, n):
        # Helmert-type diagonal directions
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -k
        out.append(np.diag(d / np.linalg.norm(d)))
    B = np.stack(out)
    B.setflags(write=False)
    return B


@lru_cache(maxsize=None)
def weyl_basis(n):
    """Orthonormal basis of the Weyl subspace, shape ``(dim, N, N)``."""
    N = n * (n - 1) // 2
    iu, ju = np.triu_indices(N)
    S = np.zeros((len(iu), N, N))
    k = np.arange(len(iu))
    off = iu != ju
    S[k, iu, ju] = np.where(off, 1 / math.sqrt(2), 1.0)
    S[k, ju, iu] = S[k, iu, ju]
    proj = np.empty_like(S)
    for s in range(0, len(S), CHUNK):
        _, _, w, _, _ = decompose_mat(bianchi_project_mat(S[s:s + CHUNK]))
        proj[s:s + CHUNK] = w
    flat = S.reshape(len(S), -1)
    P = flat @ proj.reshape(len(S), -1).T
    P = 0.5 * (P + P.T)
    evals, evecs = np.linalg.eigh(P)
    B = (evecs[:, evals > 0.5].T @ flat).reshape(-1, N, N)
    B.setflags(write=False)
    return B


def weyl_dimension(n):
    return n * (n + 1) * (n + 2) * (n - 3) // 12


# ----------------------------------------------------------------------------
# invariance scan
# ----------------------------------------------------------------------------

@dataclass
class ScanReport:
    cone: ConeSpec
    samples: int
    seed: int
    max_dF: float
    worst_witness: CurvatureOperator
    ascent_used: bool
    violations: int
    sampled_max_dF: float = float("nan")
    worst_index: int = -1
    ascent_iterations: int = 0
    tolerance: float = DF_TOL
    wall_ms: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.violations == 0


def _scan_directions(n, seed, start, stop):
    rngs = [substream(seed, "scan", n, k) for k in range(start, stop)]
    thetas = np.array([r.uniform(0.0, math.pi / 2) for r in rngs])
    us = np.stack([random_traceless(n, r) for r in rngs])
    return thetas, us, random_weyl_batch(n, rngs)


def _scan_chunk(n, a, seed, start, stop):
    thetas, us, vs = _scan_directions(n, seed, start, stop)
    return f_and_df_mat(boundary_mat(n, a, 1.0, thetas, us, vs))[1]


def _run_chunks(n, a, seed, samples, jobs):
    bounds = [(s, min(s + CHUNK, samples)) for s in range(0, samples, CHUNK)]
    if jobs is None or jobs <= 1 or len(bounds) == 1:
        parts = [_scan_chunk(n, a, seed, s, e) for s, e in bounds]
    else:
        from joblib import Parallel, delayed
        parts = Parallel(n_jobs=jobs)(delayed(_scan_chunk)(n, a, seed, s, e) for s, e in bounds)
    return np.concatenate(parts)


class _Chart:
    """Coordinates ``x = (c_u, c_v, theta)`` on ``d Omega(a)`` at ``lambda_bar = 1``.

    ``c_u`` and ``c_v`` are kept at unit length; they are coefficients in
    orthonormal bases of the traceless and Weyl subspaces.
    """

    def __init__(self, n, a):
        self.n, self.a = n, a
        self.Bu = traceless_basis(n)
        self.Bv = weyl_basis(n)
        self.ku, self.kv = len(self.Bu), len(self.Bv)
        self.dim = self.ku + self.kv + 1

    def encode(self, theta, u, v):
        cu = self.Bu.reshape(self.ku, -1) @ u.ravel()
        cv = self.Bv.reshape(self.kv, -1) @ v.ravel()
        return self.normalize(np.concatenate([cu, cv, [theta]]))

    def normalize(self, x):
        x = x.copy()
        x[:self.ku] /= np.linalg.norm(x[:self.ku])
        x[self.ku:-1] /= np.linalg.norm(x[self.ku:-1])
        return x

    def split(self, x):
        n, N = self.n, len(self.Bv[0])
        u = (x[:self.ku] @ self.Bu.reshape(self.ku, -1)).reshape(n, n)
        v = (x[self.ku:-1] @ self.Bv.reshape(self.kv, -1)).reshape(N, N)
        return u, v, x[-1]

    def mat(self, x):
        u, v, th = self.split(x)
        return boundary_mat(self.n, self.a, 1.0, th, u, v)

    def value(self, x):
        return float(f_and_df_mat(self.mat(x))[1])

    def gradient(self, x, h):
        """Central differences; ``x`` must be normalized.

        Moving coordinate ``i`` of a unit block by ``h`` and renormalizing gives
        ``(y + h b_i)/sqrt(1 + 2 h y_i + h^2)``, a rank-one update of the base point.
        """
        u, v, th = self.split(x)
        cu, cv = x[:self.ku], x[self.ku:-1]
        vals = np.empty((2, self.dim))
        for sgn_k, sgn in enumerate((1.0, -1.0)):
            d = sgn * h
            for s in range(0, self.ku, CHUNK):
                idx = np.arange(s, min(s + CHUNK, self.ku))
                us = (u + d * self.Bu[idx]) / np.sqrt(1 + 2 * d * cu[idx] + d * d)[:, None, None]
                vals[sgn_k, idx] = f_and_df_mat(boundary_mat(self.n, self.a, 1.0, th, us, v))[1]
            for s in range(0, self.kv, CHUNK):
                idx = np.arange(s, min(s + CHUNK, self.kv))
                vs = (v + d * self.Bv[idx]) / np.sqrt(1 + 2 * d * cv[idx] + d * d)[:, None, None]
                vals[sgn_k, self.ku + idx] = f_and_df_mat(
                    boundary_mat(self.n, self.a, 1.0, th, u, vs))[1]
            vals[sgn_k, -1] = f_and_df_mat(boundary_mat(self.n, self.a, 1.0, th + d, u, v))[1]
        return (vals[0] - vals[1]) / (2 * h)


def _ascent(chart, x0, max_iter, h=1e-5):
    """Gradient ascent with central differences and backtracking."""
    x = chart.normalize(x0)
    fx = chart.value(x)
    step, iters = 0.1, 0
    for _ in range(max_iter):
        iters += 1
        g = chart.gradient(x, h)
        gn = np.linalg.norm(g)
        if gn < 1e-12:
            break
        improved = False
        while step > 1e-8:
            trial = chart.normalize(x + step * g / gn)
            ft = chart.value(trial)
            if ft > fx:
                x, fx = trial, ft
                step *= 2.0
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return x, fx, iters


def scan_invariance(n, a, samples, seed=0, ascent=True, jobs=None, tol=DF_TOL, ascent_iter=20):
    """Largest ``dF_R(Q(R))`` over random points of ``d Omega(a)`` with ``lambda_bar = 1``.

    Samples are evaluated in fixed chunks keyed by global index, so the report
    does not depend on ``jobs``.  Ties in the maximum go to the lowest index.
    """
    n = _check_n(n)
    _check_open_a(n, a)
    if int(samples) != samples or samples < 1:
        raise InvalidArgumentError(f"samples must be a positive integer, got {samples}")
    samples = int(samples)
    t0 = time.perf_counter()
    dF = _run_chunks(n, a, seed, samples, jobs)
    k = int(np.argmax(dF))
    sampled_max = float(dF[k])
    violations = int(np.count_nonzero(dF > tol))

    start = k - k % CHUNK
    thetas, us, vs = _scan_directions(n, seed, start, min(start + CHUNK, samples))
    theta, u, v = thetas[k - start], us[k - start], vs[k - start]
    witness_mat = boundary_mat(n, a, 1.0, theta, u, v)
    best = sampled_max
    iters = 0
    if ascent:
        chart = _Chart(n, a)
        x, fx, iters = _ascent(chart, chart.encode(theta, u, v), ascent_iter)
        if fx > best:
            best = fx
            witness_mat = chart.mat(x)
        if best > tol and sampled_max <= tol:
            violations += 1
    return ScanReport(
        cone=ConeSpec.omega(n, a), samples=samples, seed=int(seed), max_dF=float(best),
        worst_witness=CurvatureOperator(n, witness_mat), ascent_used=bool(ascent),
        violations=violations, sampled_max_dF=sampled_max, worst_index=k,
        ascent_iterations=iters, tolerance=tol,
        wall_ms=(time.perf_counter() - t0) * 1e3,
    )


# ----------------------------------------------------------------------------
# cone inclusions
# ----------------------------------------------------------------------------

def inclusion_coefficients(n):
    """Exact comparison of slack weights for ``Omega(n/4 - e') < Theta(delta) < Omega(n/4 - 1/n)``.

    With ``e' = 1/(2(n-1))`` and ``delta = 2/((n-2)(n+1))``.  The first
    inclusion holds iff ``c_I/c_Ric <= delta`` and ``c_I/c_W <= delta`` for the
    smaller cone; the second iff ``delta * max(c_Ric, c_W) <= c_I`` for the
    larger one.
    """
    n = _check_n(n)
    delta = Fraction(2, (n - 2) * (n + 1))
    a1 = Fraction(n, 4) - Fraction(1, 2 * (n - 1))
    a2 = Fraction(n, 4) - Fraction(1, n)

    def weights(a):
        return (n - 4 * a) / 4, a, (n - 2 + 4 * a) / 4

    i1, r1, w1 = weights(a1)
    i2, r2, w2 = weights(a2)
    first = i1 / r1 <= delta and i1 / w1 <= delta
    second = delta * max(r2, w2) <= i2
    return {
        "delta": delta, "a_small": a1, "a_large": a2,
        "first": first, "second": second,
        "first_margin": delta - max(i1 / r1, i1 / w1),
        "second_margin": i2 - delta * max(r2, w2),
    }


def check_inclusions(n, samples, seed=0):
    """Sample both inclusions and compare the slack weights exactly.

    Assertions are made only for ``n >= 11``; below that the result is
    reported with ``asserted = False``.
    """
    n = _check_n(n)
    if int(samples) != samples or samples < 1:
        raise InvalidArgumentError(f"samples must be a positive integer, got {samples}")
    coeffs = inclusion_coefficients(n)
    delta = float(coeffs["delta"])
    small = ConeSpec.omega(n, float(coeffs["a_small"]))
    mid = ConeSpec.theta(n, delta)
    large = ConeSpec.omega(n, float(coeffs["a_large"]))
    fail1 = fail2 = 0
    worst1 = worst2 = math.inf
    for k in range(int(samples)):
        for src, dst, which in ((small, mid, 1), (mid, large, 2)):
            rng = substream(seed, "inclusion", n, which, k)
            R = sample_member(src, rng)
            scale = float(np.sum(R.mat * R.mat))
            got = member(R, dst, tol=ROUNDOFF * scale)
            rel = got.slack / scale
            if which == 1:
                worst1 = min(worst1, rel)
                fail1 += not got.member
            else:
                worst2 = min(worst2, rel)
                fail2 += not got.member
    asserted = n >= 11
    ok = coeffs["first"] and coeffs["second"] and fail1 == 0 and fail2 == 0
    return {
        "n": n, "samples": int(samples), "seed": int(seed), "asserted": asserted,
        "status": "checked" if asserted else "report-only (assertions need n >= 11)",
        "delta_n": delta, "a_small": float(coeffs["a_small"]), "a_large": float(coeffs["a_large"]),
        "coefficients": {"first": bool(coeffs["first"]), "second": bool(coeffs["second"]),
                         "first_margin": str(coeffs["first_margin"]),
                         "second_margin": str(coeffs["second_margin"])},
        "failures": {"first": fail1, "second": fail2},
        "min_relative_slack": {"first": worst1, "second": worst2},
        "ok": bool(ok),
    }


# ----------------------------------------------------------------------------
# Ricci positivity and the positive-curvature-operator probe
# ----------------------------------------------------------------------------

def extremal_ricci_min(n, a, lam=1.0):
    """Smallest Ricci eigenvalue over ``Omega(a)`` at fixed ``lambda_bar``."""
    return lam * (1.0 - math.sqrt((n - 4 * a) * (n - 2) / (8 * a)))


def extremal_ricci_operator(n, a, lam=1.0):
    """Ricci-type boundary point whose traceless Ricci has the spectrum
    ``(1, ..., 1, -(n-1)) / sqrt(n(n-1))`` (one eigenvalue as negative as possible)."""
    d = np.full(n, 1.0 / math.sqrt(n * (n - 1)))
    d[-1] = -(n - 1) / math.sqrt(n * (n - 1))
    u = np.diag(d)
    return CurvatureOperator(n, boundary_mat(n, a, lam, 0.0, u, np.zeros((len(identity_mat(n)),) * 2)))


def ricci_positivity(n, a, samples, seed=0):
    """Minimum Ricci eigenvalue over random members of ``Omega(a)``, ``lambda_bar = 1``."""
    n = _check_n(n)
    if not a > n / 4 - 0.5:
        raise DomainError(f"Ricci positivity is only claimed for a > n/4 - 1/2 = {n / 4 - 0.5}")
    cone = ConeSpec.omega(n, a)
    lowest = math.inf
    for k in range(int(samples)):
        R = sample_member(cone, substream(seed, "ricci-positivity", n, k))
        lowest = min(lowest, float(np.linalg.eigvalsh(ricci_t(R.tensor))[0]))
    ext = extremal_ricci_operator(n, a)
    ext_min = float(np.linalg.eigvalsh(ricci_t(ext.tensor))[0])
    return {
        "n": n, "a": a, "samples": int(samples), "seed": int(seed),
        "min_ricci_eigenvalue": lowest,
        "extremal_min_eigenvalue": ext_min,
        "extremal_closed_form": extremal_ricci_min(n, a),
        "ok": bool(lowest > 0 and ext_min > 0),
    }


def positive_operator_probe(n, a, samples, seed=0):
    """Exploratory: how often do boundary points of ``Omega(a)`` have a positive curvature operator?"""
    n = _check_n(n)
    _check_open_a(n, a)
    count, lowest = 0, math.inf
    for k in range(int(samples)):
        rng = substream(seed, "pco-probe", n, k)
        R = sample_boundary(n, a, seed, rng.uniform(0.0, math.pi / 2), rng=rng)
        ev = float(np.linalg.eigvalsh(R.mat)[0])
        lowest = min(lowest, ev)
        count += ev > 0
    return {"n": n, "a": a, "samples": int(samples), "positive_fraction": count / samples,
            "min_operator_eigenvalue": lowest}
