"""Cyclic Jacobi eigensolver for small dense Hermitian matrices."""

from __future__ import annotations

import math

import numpy as np

OFFDIAG_TOL = 1e-13
MAX_SWEEPS = 100


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(matrix, tol: float = OFFDIAG_TOL, vectors: bool = True):
    """Diagonalize a Hermitian matrix with cyclic Jacobi rotations.

    Pairs ``(p, q)`` are swept in row-major order. Each rotation first removes
    the phase of ``a[p, q]`` and then applies a real Givens rotation, so the
    same code handles real symmetric and complex Hermitian input.

    Parameters
    ----------
    matrix : array_like, shape (m, m)
        Hermitian input. Only Hermitian matrices are supported; the strictly
        lower triangle is not checked.
    tol : float
        Convergence threshold on the Frobenius norm of the off-diagonal part,
        relative to ``max(1, ||matrix||_F)``.
    vectors : bool
        Whether to accumulate eigenvectors.

    Returns
    -------
    w : ndarray, shape (m,)
        Eigenvalues in ascending order.
    v : ndarray, shape (m, m)
        Unitary matrix whose columns are the matching eigenvectors. Only
        returned if ``vectors`` is true.
    """
    a = np.array(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    m = a.shape[0]
    v = np.eye(m, dtype=complex) if vectors else None
    scale = max(1.0, float(np.linalg.norm(a)))
    threshold = tol * scale
    # rotations on entries this small cannot move the off-diagonal norm
    skip = 1e-3 * threshold / max(m, 1)

    for _ in range(MAX_SWEEPS):
        if _offdiag_norm(a) < threshold:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                z = a[p, q]
                r = abs(z)
                if r <= skip:
                    continue
                phase = z / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = 0.5 * math.atan2(2.0 * r, app - aqq)
                c = math.cos(theta)
                s = math.sin(theta)
                # V = diag(1, conj(phase)) @ [[c, -s], [s, c]]
                v00, v01 = c, -s
                v10, v11 = s * phase.conjugate(), c * phase.conjugate()
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p * v00 + col_q * v10
                a[:, q] = col_p * v01 + col_q * v11
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = row_p * v00 + row_q * np.conj(v10)
                a[q, :] = row_p * v01 + row_q * np.conj(v11)
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = vp * v00 + vq * v10
                    v[:, q] = vp * v01 + vq * v11
    else:
        if _offdiag_norm(a) >= threshold:
            raise ArithmeticError("Jacobi iteration did not converge")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    if v is None:
        return w[order]
    return w[order], v[:, order]


def jacobi_eigvalsh(matrix, tol: float = OFFDIAG_TOL) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (see :func:`jacobi_eigh`)."""
    return jacobi_eigh(matrix, tol=tol, vectors=False)

