"""Pure-numpy implementation of the displacement-operator kernels.

Matrix elements of the displacement operator D(alpha), alpha = rho e^{i phi}:

    D[n+d, n] = e^{ i d phi} q[d, n](rho)
    D[n, n+d] = (-1)^d e^{-i d phi} q[d, n](rho)          (d >= 0)

with q[d, n] = rho^d e^{-rho^2/2} sqrt(n!/(n+d)!) L_n^(d)(rho^2), generated by
the three-term Laguerre recurrence in n. Angular sums are indexed by
d = -N..N stored at column N + d.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.special import gammaln


def radial_table(rho: np.ndarray, N: int) -> np.ndarray:
    """q[r, d, n] for all radii; entries with n + d > N are left at zero."""
    rho = np.asarray(rho, dtype=float)
    R = rho.size
    x = rho**2
    d = np.arange(N + 1, dtype=float)
    logrho = np.log(np.where(rho > 0, rho, 1.0))
    # q0[r, d] = rho^d e^{-x/2} / sqrt(d!)
    q0 = np.exp(d[None, :] * logrho[:, None] - 0.5 * x[:, None] - 0.5 * gammaln(d + 1.0)[None, :])
    q0[(rho == 0)[:, None] & (d[None, :] > 0)] = 0.0
    q = np.zeros((R, N + 1, N + 1))
    q[:, :, 0] = q0
    if N == 0:
        return q
    prev = q0
    cur = q0 * (1.0 + d[None, :] - x[:, None]) / np.sqrt(d + 1.0)[None, :]
    q[:, :, 1] = cur
    for n in range(1, N):
        nxt = ((2 * n + 1 + d[None, :] - x[:, None]) * cur - np.sqrt(n * (n + d))[None, :] * prev) / np.sqrt(
            (n + 1) * (n + 1 + d)
        )[None, :]
        q[:, :, n + 1] = nxt
        prev, cur = cur, nxt
    # mask entries outside the (N+1) x (N+1) matrix
    dd, nn = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    q[:, dd + nn > N] = 0.0
    return q


def _index_maps(N: int):
    j, k = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    d = j - k
    ad = np.abs(d)
    n = np.minimum(j, k)
    sign = np.where((d < 0) & (ad % 2 == 1), -1.0, 1.0)
    return d, ad, n, sign


def accumulate(rho: np.ndarray, C: np.ndarray, N: int) -> np.ndarray:
    """sum_r sum_{p in r} c_p D(alpha_p), given angular sums C[r, N + d] = sum_p c_p e^{i d phi_p}."""
    q = radial_table(rho, N)
    d, ad, n, sign = _index_maps(N)
    # out[j, k] = sign[j, k] * sum_r C[r, N + d] q[r, |d|, min(j, k)]
    qsel = q[:, ad, n]  # (R, N+1, N+1)
    csel = C[:, N + d]  # (R, N+1, N+1)
    return sign * np.einsum("rjk,rjk->jk", qsel, csel)


def trace_coeffs(rho: np.ndarray, F: np.ndarray, N: int) -> np.ndarray:
    """T[r, N + d] with tr(D(alpha_p) F) = sum_d e^{i d phi_p} T[r(p), N + d]."""
    q = radial_table(rho, N)
    d, ad, n, sign = _index_maps(N)
    # tr(D F) = sum_{j,k} D[j,k] F[k,j]
    weights = sign[None] * q[:, ad, n] * F.T[None]  # (R, j, k)
    return weights.reshape(len(rho), -1) @ _diagonal_scatter(N)


@lru_cache(maxsize=8)
def _diagonal_scatter(N: int):
    """Sparse one-hot map from flattened (j, k) to the diagonal index N + j - k."""
    d = _index_maps(N)[0].ravel()
    rows = np.arange(d.size)
    return sparse.csr_matrix((np.ones(d.size), (rows, N + d)), shape=(d.size, 2 * N + 1))


def displacement_matrix(alpha: complex, N: int) -> np.ndarray:
    rho, phi = abs(alpha), np.angle(alpha)
    C = np.exp(1j * np.arange(-N, N + 1) * phi)[None, :]
    return accumulate(np.array([rho]), C, N)
