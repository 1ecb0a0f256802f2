"""Symmetric tridiagonal eigensolver: Sturm-sequence bisection for the
eigenvalues, inverse iteration for the eigenvectors.

The matrix is passed as ``(diag, off)`` with ``len(off) == len(diag) - 1``.
"""
from __future__ import annotations

import numba
import numpy as np

from ..errors import ConvergenceFailure

EIG_RTOL = 1e-13
INVERSE_ITERATIONS = 2


@numba.njit(cache=True)
def sturm_count(diag, off2, x, pivmin):
    """Number of eigenvalues strictly below ``x`` (negative pivots of T - xI)."""
    n = diag.shape[0]
    count = 0
    q = diag[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, n):
        q = diag[i] - x - off2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect(diag, off2, index, lo, hi, rtol, atol, pivmin):
    # invariant: count(lo) <= index < count(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= max(rtol * max(abs(lo), abs(hi)), atol) or mid == lo or mid == hi:
            break
        if sturm_count(diag, off2, mid, pivmin) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@numba.njit(cache=True)
def _tridiag_solve_pivoted(diag, off, shift, rhs, tiny):
    """Solve (T - shift I) x = rhs by LU with partial pivoting (two-band U)."""
    n = diag.shape[0]
    d = diag - shift
    du = off.copy()
    dl = off.copy()
    du2 = np.zeros(max(n - 2, 0))
    b = rhs.copy()
    perm = np.zeros(max(n - 1, 0), dtype=np.bool_)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            # no row interchange
            if d[i] == 0.0:
                d[i] = tiny
            fact = dl[i] / d[i]
            dl[i] = fact
            d[i + 1] -= fact * du[i]
        else:
            perm[i] = True
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
    if d[n - 1] == 0.0:
        d[n - 1] = tiny
    for i in range(n - 1):
        if perm[i]:
            t = b[i]
            b[i] = b[i + 1]
            b[i + 1] = t - dl[i] * b[i]
        else:
            b[i + 1] -= dl[i] * b[i]
    x = np.empty(n)
    x[n - 1] = b[n - 1] / d[n - 1]
    if n > 1:
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return x


def _gershgorin(diag, off):
    a = np.abs(off)
    radius = np.zeros_like(diag)
    radius[:-1] += a
    radius[1:] += a
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def tridiagonal_eigenvalues(diag, off, indices, rtol: float = EIG_RTOL) -> np.ndarray:
    """Eigenvalues with the given 0-based ascending indices, by bisection."""
    diag = np.ascontiguousarray(diag, dtype=float)
    off = np.ascontiguousarray(off, dtype=float)
    n = diag.size
    if n == 0:
        raise ValueError("empty matrix")
    lo, hi = _gershgorin(diag, off)
    norm = max(abs(lo), abs(hi), 1e-300)
    eps = np.finfo(float).eps
    pivmin = max(np.finfo(float).tiny, eps * eps * max(1.0, float(np.max(off * off, initial=0.0))))
    atol = 4 * eps * norm
    pad = 2 * atol + eps * norm
    lo -= pad
    hi += pad
    off2 = off * off
    out = np.empty(len(indices))
    for j, idx in enumerate(indices):
        if not 0 <= idx < n:
            raise ValueError(f"eigenvalue index {idx} outside matrix of size {n}")
        out[j] = _bisect(diag, off2, int(idx), lo, hi, rtol, atol, pivmin)
    return out


def inverse_iteration(diag, off, value: float, rng: np.random.Generator,
                      previous=(), iterations: int = INVERSE_ITERATIONS) -> np.ndarray:
    """Unit eigenvector for ``value``; orthogonalised against ``previous``
    (eigenvectors of nearby eigenvalues) at every step."""
    diag = np.ascontiguousarray(diag, dtype=float)
    off = np.ascontiguousarray(off, dtype=float)
    n = diag.size
    if n == 1:
        return np.ones(1)
    scale = max(np.max(np.abs(diag)), np.max(np.abs(off), initial=0.0))
    tiny = np.finfo(float).eps * scale
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    for _ in range(iterations):
        for v in previous:
            x -= np.dot(v, x) * v
        x = _tridiag_solve_pivoted(diag, off, value, x, tiny)
        nrm = np.linalg.norm(x)
        if not np.isfinite(nrm) or nrm == 0:
            raise ConvergenceFailure("inverse iteration produced a degenerate vector")
        x /= nrm
    for v in previous:
        x -= np.dot(v, x) * v
    x /= np.linalg.norm(x)
    # sign convention: largest-magnitude component positive
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    resid = _apply(diag, off, x) - value * x
    if np.linalg.norm(resid) > 1e3 * np.sqrt(n) * np.finfo(float).eps * max(scale, 1.0):
        raise ConvergenceFailure(
            f"inverse iteration stagnated: residual {np.linalg.norm(resid):.3e}")
    return x


def _apply(diag, off, x):
    y = diag * x
    y[:-1] += off * x[1:]
    y[1:] += off * x[:-1]
    return y


def solve_linear_spectrum(matrix, count: int, seed: int = 0, start: int = 0):
    """Lowest ``count`` eigenpairs (from index ``start``) of a symmetric
    tridiagonal ``(diag, off)``, ascending.

    Returns ``(values, vectors)`` with vectors as columns.  Deterministic for
    a fixed ``seed``.
    """
    diag, off = matrix
    n = len(diag)
    if count < 1 or start < 0 or start + count > n:
        raise ValueError(f"cannot take {count} eigenpairs from index {start} of a {n}x{n} matrix")
    values = tridiagonal_eigenvalues(diag, off, range(start, start + count))
    rng = np.random.default_rng(seed)
    vectors = np.empty((n, count))
    gap_tol = 1e-3 * max(abs(values[-1] - values[0]), 1e-12)
    for j, lam in enumerate(values):
        close = [vectors[:, i] for i in range(j) if abs(values[i] - lam) < gap_tol]
        vectors[:, j] = inverse_iteration(diag, off, lam, rng, close)
    return values, vectors
