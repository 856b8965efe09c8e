"""
Orthogonal factor model  s ~ L L' + diag(omega).

Two estimators are offered: principal-component extraction and maximum
likelihood under the uniqueness condition that L' diag(omega)^-1 L is diagonal.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .base_analyzer import BaseAnalyzer
from .numerics import sym_eigen
from ..errors import DomainError, NumericError
from ..models import FactorMethod, FactorModel

logger = logging.getLogger(__name__)

UNIQUENESS_FLOOR = 1e-3
PSD_TOLERANCE = 1e-8
PD_TOLERANCE = 1e-12
ML_TOLERANCE = 1e-8
ML_MAX_ITERATIONS = 500
# relative slack for "the likelihood went down"
ASCENT_SLACK = 1e-12


class FactorAnalyzer(BaseAnalyzer):
    """Principal-component and maximum-likelihood factor extraction"""

    @staticmethod
    def _prepare(s, k: int, labels: Optional[Sequence[str]]) -> Tuple[np.ndarray, List[str]]:
        matrix = FactorAnalyzer.as_square(s, "factor analysis input")
        p = matrix.shape[0]
        if not 1 <= k < p:
            raise DomainError(f"number of factors must be between 1 and {p - 1}, got {k}")
        if labels is None:
            labels = [f"V{i + 1}" for i in range(p)]
        if len(labels) != p:
            raise DomainError(f"{len(labels)} labels for a {p}x{p} matrix")
        return matrix, list(labels)

    @staticmethod
    def _clamp(raw: np.ndarray, labels: List[str]) -> Tuple[np.ndarray, List[str]]:
        clamped = np.maximum(raw, UNIQUENESS_FLOOR)
        heywood = [label for label, value in zip(labels, raw) if value < UNIQUENESS_FLOOR]
        return clamped, heywood

    @staticmethod
    def fa_principal(s, k: int, labels: Optional[Sequence[str]] = None) -> FactorModel:
        matrix, labels = FactorAnalyzer._prepare(s, k, labels)
        eigen = sym_eigen(matrix)
        largest = float(eigen.eigenvalues[0])
        if float(eigen.eigenvalues[-1]) < -PSD_TOLERANCE * max(1.0, largest):
            raise NumericError("matrix is not positive semidefinite")

        loadings = eigen.eigenvectors[:, :k] * np.sqrt(np.maximum(eigen.eigenvalues[:k], 0.0))
        raw = np.diag(matrix) - np.sum(loadings ** 2, axis=1)
        uniquenesses, heywood = FactorAnalyzer._clamp(raw, labels)
        if heywood:
            logger.warning("Heywood case: uniqueness clamped to %g for %s", UNIQUENESS_FLOOR, ", ".join(heywood))

        return FactorModel(
            variable_labels=labels,
            method=FactorMethod.PRINCIPAL,
            n_factors=k,
            loadings=loadings.tolist(),
            uniquenesses=uniquenesses.tolist(),
            heywood=bool(heywood),
            heywood_variables=heywood,
        )

    @staticmethod
    def loadings_for(s: np.ndarray, uniquenesses: np.ndarray, k: int) -> np.ndarray:
        """
        Maximum-likelihood loadings given the uniquenesses.

        With theta, U the top-k eigenpairs of omega^-1/2 s omega^-1/2, the loadings are
        omega^1/2 U diag(sqrt(max(theta - 1, 0))), which makes L' omega^-1 L diagonal.
        """
        root = np.sqrt(uniquenesses)
        scaled = s / np.outer(root, root)
        eigen = sym_eigen((scaled + scaled.T) / 2.0)
        strengths = np.sqrt(np.maximum(eigen.eigenvalues[:k] - 1.0, 0.0))
        return root[:, None] * eigen.eigenvectors[:, :k] * strengths

    @staticmethod
    def log_likelihood(s: np.ndarray, loadings: np.ndarray, uniquenesses: np.ndarray, n_samples: int) -> float:
        """Gaussian log-likelihood up to its additive constant: -(n/2)(ln|Sigma| + tr(Sigma^-1 s))"""
        with FactorAnalyzer.numeric_guard("log-likelihood"):
            sigma = loadings @ loadings.T + np.diag(uniquenesses)
            sign, log_det = np.linalg.slogdet(sigma)
            if sign <= 0:
                raise NumericError("implied covariance matrix is not positive definite")
            trace = float(np.trace(np.linalg.solve(sigma, s)))
        return -0.5 * n_samples * (float(log_det) + trace)

    @staticmethod
    def _discrepancy(uniquenesses: np.ndarray, s: np.ndarray, k: int):
        """Profile ML discrepancy over the uniquenesses and its gradient"""
        root = np.sqrt(uniquenesses)
        scaled = s / np.outer(root, root)
        values, vectors = np.linalg.eigh((scaled + scaled.T) / 2.0)
        values, vectors = values[::-1], vectors[:, ::-1]
        rest = values[k:]
        objective = -float(np.sum(np.log(rest) - rest)) - k + s.shape[0]

        loadings = root[:, None] * vectors[:, :k] * np.sqrt(np.maximum(values[:k] - 1.0, 0.0))
        residual = loadings @ loadings.T + np.diag(uniquenesses) - s
        return objective, np.diag(residual) / uniquenesses ** 2

    @staticmethod
    def _polish(s: np.ndarray, start: np.ndarray, k: int) -> Optional[np.ndarray]:
        bounds = [(UNIQUENESS_FLOOR, max(UNIQUENESS_FLOOR, float(value))) for value in np.diag(s)]
        try:
            result = minimize(
                FactorAnalyzer._discrepancy,
                np.clip(start, UNIQUENESS_FLOOR, None),
                args=(s, k),
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={"maxiter": 1000, "ftol": 1e-14, "gtol": 1e-10},
            )
        except (np.linalg.LinAlgError, FloatingPointError, ValueError) as e:
            logger.warning("Quasi-Newton refinement failed: %s", e)
            return None
        if not np.all(np.isfinite(result.x)):
            return None
        logger.debug("L-BFGS-B refinement: %s after %d iterations", result.message, result.nit)
        return np.asarray(result.x, dtype=float)

    @staticmethod
    def fa_ml(s, k: int, n_samples: int, labels: Optional[Sequence[str]] = None) -> FactorModel:
        """
        Maximum-likelihood factor analysis by alternating conditional maximization.

        Step (a) sets L from omega (loadings_for); step (b) sets omega = diag(s - L L').
        Iteration stops when max |delta omega| <= 1e-8 or after 500 rounds; a round that
        would lower the likelihood is rejected. If the alternation did not converge the
        best uniquenesses are refined with L-BFGS-B on the profile discrepancy, and kept
        only when the likelihood improves.
        """
        matrix, labels = FactorAnalyzer._prepare(s, k, labels)
        FactorAnalyzer.require_samples(n_samples, 2)
        p = matrix.shape[0]
        eigen = sym_eigen(matrix)
        if float(eigen.eigenvalues[-1]) <= PD_TOLERANCE * max(1.0, float(eigen.eigenvalues[0])):
            raise NumericError("matrix is singular or not positive definite")
        if (p - k) ** 2 < p + k:
            logger.warning(
                "%d factors for %d variables leaves negative degrees of freedom; the model is not identified",
                k, p,
            )

        diagonal = np.diag(matrix).copy()
        off_diagonal = matrix / np.sqrt(np.outer(diagonal, diagonal)) - np.eye(p)
        if float(np.max(np.abs(off_diagonal))) <= PD_TOLERANCE:
            logger.info("No off-diagonal structure; every variable is its own unique factor")
            loadings = np.zeros((p, k))
            return FactorModel(
                variable_labels=labels,
                method=FactorMethod.MAX_LIKELIHOOD,
                n_factors=k,
                loadings=loadings.tolist(),
                uniquenesses=diagonal.tolist(),
                log_likelihood=FactorAnalyzer.log_likelihood(matrix, loadings, diagonal, n_samples),
                converged=True,
                iterations=0,
            )

        with FactorAnalyzer.numeric_guard("initial uniquenesses"):
            inverse_diagonal = np.diag(np.linalg.inv(matrix))
        uniquenesses = np.clip((1.0 - k / (2.0 * p)) / inverse_diagonal, UNIQUENESS_FLOOR, None)
        loadings = FactorAnalyzer.loadings_for(matrix, uniquenesses, k)
        current = FactorAnalyzer.log_likelihood(matrix, loadings, uniquenesses, n_samples)
        trace = [current]

        converged = False
        iterations = 0
        while iterations < ML_MAX_ITERATIONS:
            iterations += 1
            updated = np.clip(diagonal - np.sum(loadings ** 2, axis=1), UNIQUENESS_FLOOR, None)
            updated_loadings = FactorAnalyzer.loadings_for(matrix, updated, k)
            candidate = FactorAnalyzer.log_likelihood(matrix, updated_loadings, updated, n_samples)
            if candidate < current - ASCENT_SLACK * max(1.0, abs(current)):
                logger.debug("Alternation step %d lowered the likelihood; stopping", iterations)
                break
            change = float(np.max(np.abs(updated - uniquenesses)))
            uniquenesses, loadings, current = updated, updated_loadings, max(candidate, current)
            trace.append(current)
            if change <= ML_TOLERANCE:
                converged = True
                break

        if not converged:
            polished = FactorAnalyzer._polish(matrix, uniquenesses, k)
            if polished is not None:
                polished_loadings = FactorAnalyzer.loadings_for(matrix, polished, k)
                candidate = FactorAnalyzer.log_likelihood(matrix, polished_loadings, polished, n_samples)
                if candidate >= current:
                    refit = np.clip(diagonal - np.sum(polished_loadings ** 2, axis=1), UNIQUENESS_FLOOR, None)
                    converged = float(np.max(np.abs(refit - polished))) <= 1e-6
                    uniquenesses, loadings, current = polished, polished_loadings, candidate
                    trace.append(current)
            if not converged:
                logger.warning("ML factor analysis did not converge after %d iterations", iterations)

        # uniquenesses sitting on the floor are Heywood cases
        raw = diagonal - np.sum(loadings ** 2, axis=1)
        heywood = [label for label, value, omega in zip(labels, raw, uniquenesses)
                   if value < UNIQUENESS_FLOOR or math.isclose(omega, UNIQUENESS_FLOOR)]
        if heywood:
            logger.warning("Heywood case: uniqueness clamped to %g for %s", UNIQUENESS_FLOOR, ", ".join(heywood))

        return FactorModel(
            variable_labels=labels,
            method=FactorMethod.MAX_LIKELIHOOD,
            n_factors=k,
            loadings=loadings.tolist(),
            uniquenesses=uniquenesses.tolist(),
            log_likelihood=current,
            log_likelihood_trace=trace,
            converged=converged,
            iterations=iterations,
            heywood=bool(heywood),
            heywood_variables=heywood,
        )
