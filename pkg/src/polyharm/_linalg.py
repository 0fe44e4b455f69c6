"""Dense-matrix diagnostics shared by the interpolation and experiment layers."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "MatrixDiagnostics",
    "SingularSystemError",
    "diagnostics",
    "lu_sign_logabs",
    "lu_factorize",
    "lu_solve_refined",
]


@dataclass(frozen=True)
class MatrixDiagnostics:
    """Numerical singularity evidence for a square matrix.

    det_sign is -1, 0 or +1 and log_abs_det is the natural log of |det|
    (-inf when the determinant is exactly zero), both read off a pivoted LU
    factorization.  sigma_min and sigma_max come from the SVD, except that a
    matrix containing an exactly zero row or column reports sigma_min = 0.0
    exactly.  singular_verdict is true iff sigma_max == 0, or
    sigma_min <= rel_threshold * sigma_max, or det_sign == 0.
    """

    det_sign: int
    log_abs_det: float
    sigma_min: float
    sigma_max: float
    condition: float
    singular_verdict: bool
    rel_threshold: float

    def to_dict(self) -> dict:
        return {
            "det_sign": self.det_sign,
            "log_abs_det": self.log_abs_det,
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
            "condition": self.condition,
            "singular_verdict": self.singular_verdict,
            "rel_threshold": self.rel_threshold,
        }

    def describe(self) -> str:
        return (
            f"det_sign={self.det_sign}, log_abs_det={self.log_abs_det!r}, "
            f"sigma_min={self.sigma_min!r}, sigma_max={self.sigma_max!r}, "
            f"condition={self.condition!r}, rel_threshold={self.rel_threshold!r}"
        )


class SingularSystemError(RuntimeError):
    """Raised when a linear system is numerically singular.

    Carries the MatrixDiagnostics that triggered the verdict.
    """

    def __init__(self, message: str, diag: MatrixDiagnostics):
        super().__init__(message)
        self.diagnostics = diag


def _as_square(matrix) -> np.ndarray:
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError("expected a nonempty square matrix")
    if not np.isfinite(arr).all():
        raise ValueError("matrix entries must be finite")
    return arr


def lu_factorize(matrix: np.ndarray):
    """Pivoted LU factorization with singular-matrix warnings silenced."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return scipy.linalg.lu_factor(matrix, check_finite=False)


def lu_sign_logabs(matrix) -> tuple[int, float]:
    """Determinant of a square matrix as (sign, log|det|) from pivoted LU.

    An exactly zero pivot yields (0, -inf).
    """
    arr = _as_square(matrix)
    lu, piv = lu_factorize(arr)
    diag = np.diag(lu)
    if np.any(diag == 0.0):
        return 0, -math.inf
    swaps = int(np.sum(piv != np.arange(arr.shape[0])))
    sign = -1 if swaps % 2 else 1
    if int(np.sum(diag < 0.0)) % 2:
        sign = -sign
    log_abs = float(np.sum(np.log(np.abs(diag))))
    return sign, log_abs


def lu_solve_refined(lu_piv, matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """LU solve followed by one step of iterative refinement."""
    x = scipy.linalg.lu_solve(lu_piv, rhs, check_finite=False)
    residual = rhs - matrix @ x
    return x + scipy.linalg.lu_solve(lu_piv, residual, check_finite=False)


def _singular_values(arr: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.svd(arr, compute_uv=False)
    except np.linalg.LinAlgError:
        # rare non-convergence of the divide-and-conquer driver
        return scipy.linalg.svd(arr, compute_uv=False, lapack_driver="gesvd")


def diagnostics(matrix, tau: float = 1e-12) -> MatrixDiagnostics:
    """Compute MatrixDiagnostics for a square matrix.

    Parameters
    ----------
    matrix : array_like
        Square matrix with finite entries.
    tau : float
        Positive relative threshold; the matrix is declared numerically
        singular when sigma_min <= tau * sigma_max.

    Returns
    -------
    MatrixDiagnostics
    """
    arr = _as_square(matrix)
    tau = float(tau)
    if not math.isfinite(tau) or tau <= 0.0:
        raise ValueError("relative threshold tau must be a positive finite real")

    det_sign, log_abs_det = lu_sign_logabs(arr)
    svals = _singular_values(arr)
    sigma_max = float(svals[0])
    sigma_min = float(svals[-1])
    # a matrix with an exactly zero row or column is exactly rank deficient;
    # report that structurally instead of trusting SVD rounding
    if sigma_min != 0.0:
        row_alive = np.any(arr != 0.0, axis=1)
        col_alive = np.any(arr != 0.0, axis=0)
        if not (row_alive.all() and col_alive.all()):
            sigma_min = 0.0
    condition = sigma_max / sigma_min if sigma_min > 0.0 else math.inf
    verdict = (sigma_max == 0.0) or (sigma_min <= tau * sigma_max) or (det_sign == 0)
    return MatrixDiagnostics(
        det_sign=det_sign,
        log_abs_det=log_abs_det,
        sigma_min=sigma_min,
        sigma_max=sigma_max,
        condition=condition,
        singular_verdict=verdict,
        rel_threshold=tau,
    )
