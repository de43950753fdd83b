"""Brute-force reference implementations, written against index formulas only."""

import itertools

import numpy as np


def pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def tensor_from_mat(mat, n):
    T = np.zeros((n,) * 4)
    P = pairs(n)
    for p, (i, j) in enumerate(P):
        for q, (k, l) in enumerate(P):
            v = mat[p, q]
            T[i, j, k, l] = v
            T[j, i, k, l] = -v
            T[i, j, l, k] = -v
            T[j, i, l, k] = v
    return T


def mat_from_tensor(T):
    n = T.shape[0]
    P = pairs(n)
    return np.array([[T[i, j, k, l] for (k, l) in P] for (i, j) in P])


def wedge(A, B):
    n = A.shape[0]
    T = np.zeros((n,) * 4)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        T[i, j, k, l] = 0.5 * (A[i, k] * B[j, l] + A[j, l] * B[i, k]
                               - A[i, l] * B[j, k] - A[j, k] * B[i, l])
    return mat_from_tensor(T)


def ricci(T):
    n = T.shape[0]
    out = np.zeros((n, n))
    for i, j, k in itertools.product(range(n), repeat=3):
        out[i, j] += T[i, k, j, k]
    return out


def norm_sq(T):
    return 0.25 * float(np.sum(T * T))


def bianchi(T):
    return T + np.einsum("jkil->ijkl", T) + np.einsum("kijl->ijkl", T)


def parts(T):
    """Scalar, traceless-Ricci and Weyl tensors from the textbook Kulkarni-Nomizu split."""
    n = T.shape[0]
    ric = ricci(T)
    scal = np.trace(ric)
    g = np.eye(n)
    ric0 = ric - scal / n * g
    kn = lambda A, B: 2 * tensor_from_mat(wedge(A, B), n)  # noqa: E731
    t_i = scal / (2 * n * (n - 1)) * kn(g, g)
    t_r = kn(ric0, g) / (n - 2)
    return t_i, t_r, T - t_i - t_r


def cubic_form(mat):
    """<Q(R), R> = tr(R^3) + tr(R^# R) via the sharp formula over a bracket basis."""
    n = int(round((1 + np.sqrt(1 + 8 * mat.shape[0])) / 2))
    P = pairs(n)
    basis = []
    for i, j in P:
        X = np.zeros((n, n))
        X[j, i], X[i, j] = 1.0, -1.0
        basis.append(X)
    N = len(P)
    C = np.zeros((N, N, N))
    for p in range(N):
        for q in range(N):
            br = basis[p] @ basis[q] - basis[q] @ basis[p]
            for r in range(N):
                C[p, q, r] = -0.5 * np.trace(br @ basis[r])
    # (R^#)_{ab} = 1/2 sum C_{a p q} C_{b r s} R_{pr} R_{qs}
    sharp = 0.5 * np.einsum("apq,brs,pr,qs->ab", C, C, mat, mat)
    return float(np.trace(mat @ mat @ mat) + np.sum(sharp * mat))


def random_operator(n, rng):
    """Bianchi projection of a random pair-symmetric tensor, built from the tensor formula."""
    N = n * (n - 1) // 2
    G = rng.standard_normal((N, N))
    T = tensor_from_mat(G + G.T, n)
    T = T - bianchi(T) / 3
    return mat_from_tensor(T)
