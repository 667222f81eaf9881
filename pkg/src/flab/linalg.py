"""Dense complex linear algebra: determinant, singular values, Schatten norms, exp.

Every routine accepts a single square matrix or a stack of shape (..., n, n)
and loops only over the matrix dimension, so sampling thousands of small
matrices at once stays cheap.
"""

from __future__ import annotations

import math

import numpy as np

MAX_DIM = 64


def as_complex_matrix(A) -> np.ndarray:
    """Validate a square, finite complex matrix (or stack of them)."""
    A = np.asarray(A, dtype=complex)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {A.shape}")
    if A.shape[-1] < 1:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _flatten(A):
    A = as_complex_matrix(A)
    n = A.shape[-1]
    return A.reshape(-1, n, n), A.shape[:-2]


def lu_det(A):
    """Determinant via Gaussian elimination with partial (row) pivoting."""
    phase, logabs = lu_slogdet(A)
    with np.errstate(over="ignore", under="ignore"):
        det = np.where(np.isneginf(logabs), 0.0, phase * np.exp(logabs))
    return complex(det) if np.ndim(det) == 0 else det


def lu_slogdet(A):
    """(phase, log|det|) from the same elimination; log|det| is -inf for singular input."""
    U, batch = _flatten(A)
    U = U.copy()
    m, n, _ = U.shape
    phase = np.ones(m, dtype=complex)
    logabs = np.zeros(m)
    rows = np.arange(m)
    for k in range(n):
        piv = k + np.argmax(np.abs(U[:, k:, k]), axis=1)
        swap = piv != k
        if swap.any():
            row_k = U[rows, k].copy()
            U[rows, k] = U[rows, piv]
            U[rows, piv] = row_k
            phase[swap] = -phase[swap]
        pivot = U[:, k, k]
        mod = np.abs(pivot)
        with np.errstate(divide="ignore"):
            logabs += np.log(mod)
        phase *= np.where(mod > 0, pivot / np.where(mod > 0, mod, 1.0), 1.0)
        if k == n - 1:
            break
        nz = pivot != 0
        factors = np.zeros((m, n - k - 1), dtype=complex)
        factors[nz] = U[nz, k + 1:, k] / pivot[nz, None]
        U[:, k + 1:, k:] -= factors[:, :, None] * U[:, None, k, k:]
    phase, logabs = phase.reshape(batch), logabs.reshape(batch)
    if phase.ndim == 0:
        return complex(phase), float(logabs)
    return phase, logabs


def singular_values(A, tol: float = 1e-15, max_sweeps: int = 60):
    """Singular values in nonincreasing order by one-sided (Hestenes) Jacobi.

    Columns are rotated pairwise until mutually orthogonal; the column norms
    are then the singular values.  This keeps small singular values to high
    relative accuracy, unlike diagonalizing A^H A explicitly.
    """
    G, batch = _flatten(A)
    G = G.copy()
    m, n, _ = G.shape
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                ai = G[:, :, i]
                aj = G[:, :, j]
                alpha = np.einsum("mk,mk->m", ai.conj(), ai).real
                beta = np.einsum("mk,mk->m", aj.conj(), aj).real
                gamma = np.einsum("mk,mk->m", ai.conj(), aj)
                g = np.abs(gamma)
                act = g > tol * np.sqrt(alpha * beta)
                if not act.any():
                    continue
                rotated = True
                ga, al, be = gamma[act], alpha[act], beta[act]
                gabs = np.abs(ga)
                phase = ga / gabs
                zeta = (be - al) / (2.0 * gabs)
                t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                xi = ai[act]
                xj = aj[act] * phase.conj()[:, None]
                G[act, :, i] = c[:, None] * xi - s[:, None] * xj
                G[act, :, j] = s[:, None] * xi + c[:, None] * xj
        if not rotated:
            break
    sv = np.sqrt(np.einsum("mki,mki->mi", G.conj(), G).real)
    sv = -np.sort(-sv, axis=-1)
    return sv.reshape(batch + (n,))


def schatten_norm(A, p: float):
    """(sum_k s_k^p)^(1/p); ``p = inf`` gives the operator norm."""
    if not p >= 1:
        raise ValueError(f"Schatten exponent must be >= 1, got {p}")
    s = singular_values(A)
    top = s[..., 0]
    if math.isinf(p):
        out = top
    else:
        safe = np.where(top > 0, top, 1.0)
        out = np.where(top > 0, safe * np.sum((s / safe[..., None]) ** p, axis=-1) ** (1.0 / p), 0.0)
    return float(out) if np.ndim(out) == 0 else out


_TAYLOR_DEGREE = 18


def matrix_exp(A):
    """e^A by scaling and squaring around a degree-18 Taylor kernel.

    Each matrix is scaled so its 1-norm is at most 1/2, where the truncated
    series error is far below double precision, then squared back.
    """
    X, batch = _flatten(A)
    m, n, _ = X.shape
    norms = np.abs(X).sum(axis=1).max(axis=1)
    squarings = np.zeros(m, dtype=int)
    big = norms > 0.5
    squarings[big] = np.ceil(np.log2(norms[big] / 0.5)).astype(int)
    X = X / (2.0 ** squarings)[:, None, None]
    eye = np.broadcast_to(np.eye(n, dtype=complex), X.shape)
    E = eye.copy()
    for k in range(_TAYLOR_DEGREE, 0, -1):
        E = eye + (X @ E) / k
    for j in range(int(squarings.max(initial=0))):
        sel = squarings > j
        E[sel] = E[sel] @ E[sel]
    return E.reshape(batch + (n, n))
