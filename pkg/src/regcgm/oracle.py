"""Dense small-n reference matrices for checking the matrix-free formulas.

Nothing in the solvers imports this module; it exists for tests and
diagnostics, so clarity beats speed throughout.
"""
from __future__ import annotations

import numpy as np

from .cgm import RestartMemory
from .exceptions import CurvatureViolation, Singular

MAX_DIM = 512


def _check_dim(n: int):
    if n > MAX_DIM:
        raise ValueError(f"oracle matrices are limited to n <= {MAX_DIM}, got {n}")


def assemble_Bt(mem: RestartMemory) -> np.ndarray:
    """(y'y / p'y) (I - p p'/p'p) + y y'/p'y."""
    p, y = mem.p_t, mem.y_t
    n = p.size
    _check_dim(n)
    B = (mem.yty / mem.pty) * (np.eye(n) - np.outer(p, p) / mem.ptp) + np.outer(y, y) / mem.pty
    return 0.5 * (B + B.T)


def assemble_Bk1(mem: RestartMemory, p_k, y_k) -> np.ndarray:
    """BFGS update of B_t by the pair (p_k, y_k)."""
    p_k = np.asarray(p_k, dtype=float)
    y_k = np.asarray(y_k, dtype=float)
    py = float(p_k @ y_k)
    if not py > 0.0:
        raise CurvatureViolation(f"p'y = {py:.3e} <= 0")
    Bt = assemble_Bt(mem)
    Bp = Bt @ p_k
    B = Bt - np.outer(Bp, Bp) / float(p_k @ Bp) + np.outer(y_k, y_k) / py
    return 0.5 * (B + B.T)


def assemble_Ht(mem: RestartMemory) -> np.ndarray:
    """Self-scaled inverse BFGS update of (p'y / y'y) I by (p_t, y_t)."""
    p, y = mem.p_t, mem.y_t
    n = p.size
    _check_dim(n)
    rho = 1.0 / mem.pty
    V = np.eye(n) - rho * np.outer(y, p)
    H = (mem.pty / mem.yty) * V.T @ V + rho * np.outer(p, p)
    return 0.5 * (H + H.T)


def assemble_Hk1(mem: RestartMemory, p_k, y_k) -> np.ndarray:
    """Inverse BFGS update of H_t by (p_k, y_k)."""
    p_k = np.asarray(p_k, dtype=float)
    y_k = np.asarray(y_k, dtype=float)
    py = float(p_k @ y_k)
    if not py > 0.0:
        raise CurvatureViolation(f"p'y = {py:.3e} <= 0")
    V = np.eye(p_k.size) - np.outer(y_k, p_k) / py
    H = V.T @ assemble_Ht(mem) @ V + np.outer(p_k, p_k) / py
    return 0.5 * (H + H.T)


def dense_inverse(M) -> np.ndarray:
    """Inverse by Cholesky when M is symmetric positive definite, LU otherwise.

    Raises
    ------
    Singular
        If M is (numerically) rank deficient.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    _check_dim(n)
    if n == 0:
        return M.copy()
    if not np.all(np.isfinite(M)):
        raise Singular("matrix has non-finite entries")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= n * np.finfo(float).eps * sv[0]:
        raise Singular(f"matrix is rank deficient (smallest singular value {sv[-1]:.3e})")
    I = np.eye(n)
    if np.allclose(M, M.T, rtol=1e-12, atol=0.0):
        try:
            L = np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            pass
        else:
            Z = np.linalg.solve(L, I)
            return Z.T @ Z
    return np.linalg.solve(M, I)


def condition_number(M) -> float:
    """lambda_max / lambda_min for symmetric positive definite M, 2-norm condition otherwise."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if np.allclose(M, M.T, rtol=1e-12, atol=0.0):
        w = np.linalg.eigvalsh(M)
        if w[0] > 0.0:
            return float(w[-1] / w[0])
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] == 0.0:
        return float("inf")
    return float(sv[0] / sv[-1])


def materialize(op, n: int) -> np.ndarray:
    """Dense matrix of the linear map ``op`` by applying it to the unit vectors."""
    _check_dim(n)
    cols = [np.asarray(op(e), dtype=float) for e in np.eye(n)]
    return np.column_stack(cols)
