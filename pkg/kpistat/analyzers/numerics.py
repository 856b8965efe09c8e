"""
Dense linear algebra and special functions shared by the analyzers.

Eigen and singular value decompositions use Jacobi rotations so that results
are deterministic; every eigen/singular vector is sign-normalized so its entry
of largest magnitude is nonnegative (ties -> lowest index).
"""
import logging
import math
from typing import NamedTuple, Tuple

import numpy as np
from scipy import special

from .base_analyzer import BaseAnalyzer
from ..errors import ConvergenceError, DomainError, NumericError

logger = logging.getLogger(__name__)

MAX_SWEEPS = 100
OFF_DIAGONAL_TOLERANCE = 1e-14
SYMMETRY_TOLERANCE = 1e-9


class EigenResult(NamedTuple):
    eigenvalues: np.ndarray   # descending
    eigenvectors: np.ndarray  # columns aligned with eigenvalues


class SvdResult(NamedTuple):
    u: np.ndarray
    singular_values: np.ndarray  # descending, nonnegative
    v: np.ndarray


def _rotation(alpha: float, beta: float, gamma: float) -> Tuple[float, float]:
    """(c, s) of the Jacobi rotation annihilating gamma for the 2x2 block [[alpha, gamma], [gamma, beta]]"""
    zeta = (beta - alpha) / (2.0 * gamma)
    t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, c * t


def _rotate_columns(matrix: np.ndarray, p: int, q: int, c: float, s: float) -> None:
    column_p = matrix[:, p].copy()
    column_q = matrix[:, q].copy()
    matrix[:, p] = c * column_p - s * column_q
    matrix[:, q] = s * column_p + c * column_q


def _normalize_signs(vectors: np.ndarray, *companions: np.ndarray) -> None:
    """Flip columns in place so the largest-magnitude entry is nonnegative"""
    for j in range(vectors.shape[1]):
        pivot = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[pivot, j] < 0:
            vectors[:, j] = -vectors[:, j]
            for companion in companions:
                companion[:, j] = -companion[:, j]


def sym_eigen(a) -> EigenResult:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps"""
    matrix = BaseAnalyzer.as_square(a, "eigen input")
    n = matrix.shape[0]
    scale = max(1.0, float(np.max(np.abs(matrix)))) if n else 1.0
    if n and float(np.max(np.abs(matrix - matrix.T))) > SYMMETRY_TOLERANCE * scale:
        raise NumericError("eigen input is not symmetric")

    work = (matrix + matrix.T) / 2.0
    vectors = np.eye(n)
    threshold = OFF_DIAGONAL_TOLERANCE * float(np.linalg.norm(work, "fro"))

    for sweep in range(MAX_SWEEPS + 1):
        off_diagonal = math.sqrt(2.0 * float(np.sum(np.triu(work, 1) ** 2)))
        if off_diagonal <= threshold:
            break
        if sweep == MAX_SWEEPS:
            raise ConvergenceError(f"Jacobi eigen solver did not converge in {MAX_SWEEPS} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                gamma = work[p, q]
                if gamma == 0.0:
                    continue
                alpha, beta = work[p, p], work[q, q]
                # negligible against both diagonal entries
                if sweep > 3 and abs(alpha) + 100.0 * abs(gamma) == abs(alpha) \
                        and abs(beta) + 100.0 * abs(gamma) == abs(beta):
                    work[p, q] = work[q, p] = 0.0
                    continue
                c, s = _rotation(alpha, beta, gamma)
                _rotate_columns(work, p, q, c, s)
                work_t = work.T  # view; rotating its columns rotates rows of work
                _rotate_columns(work_t, p, q, c, s)
                work[p, q] = work[q, p] = 0.0
                _rotate_columns(vectors, p, q, c, s)

    eigenvalues = np.diag(work).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]
    _normalize_signs(vectors)
    return EigenResult(eigenvalues=eigenvalues, eigenvectors=vectors)


def _complete_basis(u: np.ndarray, filled: np.ndarray) -> None:
    """Replace the unfilled columns of u by orthonormal vectors (Gram-Schmidt on unit vectors)"""
    m = u.shape[0]
    basis = [u[:, j] for j in range(u.shape[1]) if filled[j]]
    candidates = iter(np.eye(m))
    for j in range(u.shape[1]):
        if filled[j]:
            continue
        for candidate in candidates:
            vector = candidate.copy()
            for existing in basis:
                vector -= np.dot(existing, vector) * existing
            for existing in basis:  # second pass for stability
                vector -= np.dot(existing, vector) * existing
            norm = np.linalg.norm(vector)
            if norm > 1e-8:
                u[:, j] = vector / norm
                basis.append(u[:, j])
                break


def svd(a) -> SvdResult:
    """Thin singular value decomposition by one-sided (Hestenes) Jacobi"""
    matrix = BaseAnalyzer.as_matrix(a, "svd input")
    m, n = matrix.shape
    if m < n:
        transposed = svd(matrix.T)
        u = transposed.v.copy()
        v = transposed.u.copy()
        _normalize_signs(u, v)
        return SvdResult(u=u, singular_values=transposed.singular_values, v=v)

    work = matrix.copy()
    v = np.eye(n)
    tolerance = 10.0 * max(m, 1) * np.finfo(float).eps
    # columns at rounding-noise level count as converged
    noise_floor = (tolerance * float(np.linalg.norm(matrix, "fro"))) ** 2

    for sweep in range(MAX_SWEEPS + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = float(np.dot(work[:, p], work[:, p]))
                beta = float(np.dot(work[:, q], work[:, q]))
                gamma = float(np.dot(work[:, p], work[:, q]))
                if gamma == 0.0 or alpha <= noise_floor or beta <= noise_floor \
                        or abs(gamma) <= tolerance * math.sqrt(alpha * beta):
                    continue
                rotated = True
                c, s = _rotation(alpha, beta, gamma)
                _rotate_columns(work, p, q, c, s)
                _rotate_columns(v, p, q, c, s)
        if not rotated:
            break
        if sweep == MAX_SWEEPS:
            raise ConvergenceError(f"Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")

    singular_values = np.linalg.norm(work, axis=0)
    order = np.argsort(-singular_values, kind="stable")
    singular_values = singular_values[order]
    work = work[:, order]
    v = v[:, order]

    cutoff = max(tolerance * (singular_values[0] if n else 0.0), math.sqrt(noise_floor))
    filled = singular_values > max(cutoff, np.finfo(float).tiny)
    u = np.zeros((m, n))
    u[:, filled] = work[:, filled] / singular_values[filled]
    singular_values[~filled] = 0.0
    _complete_basis(u, filled)
    _normalize_signs(u, v)
    return SvdResult(u=u, singular_values=singular_values, v=v)


def student_t_two_sided_p(t: float, df: int) -> float:
    """P(|T_df| >= |t|) via the regularized incomplete beta function"""
    if df < 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df}")
    if not math.isfinite(t):
        raise NumericError("t statistic must be finite")
    x = df / (df + t * t)
    return float(min(1.0, max(0.0, special.betainc(df / 2.0, 0.5, x))))
