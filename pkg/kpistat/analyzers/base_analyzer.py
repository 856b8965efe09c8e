from contextlib import contextmanager
from typing import Iterator, Sequence

import numpy as np

from ..errors import NumericError, ShapeError, TooFewSamples


class BaseAnalyzer:
    """Base analyzer class with common input checks"""

    @staticmethod
    def as_vector(values: Sequence[float], name: str = "vector") -> np.ndarray:
        """Convert to a 1-D float array, rejecting NaN/Inf"""
        vector = np.asarray(values, dtype=float)
        if vector.ndim != 1:
            raise ShapeError(f"{name} must be one-dimensional, got shape {vector.shape}")
        if not np.all(np.isfinite(vector)):
            raise NumericError(f"{name} contains NaN or Inf")
        return vector

    @staticmethod
    def as_matrix(values, name: str = "matrix") -> np.ndarray:
        """Convert to a 2-D float array, rejecting NaN/Inf"""
        matrix = np.asarray(values, dtype=float)
        if matrix.ndim != 2:
            raise ShapeError(f"{name} must be two-dimensional, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise NumericError(f"{name} contains NaN or Inf")
        return matrix

    @staticmethod
    def as_square(values, name: str = "matrix") -> np.ndarray:
        matrix = BaseAnalyzer.as_matrix(values, name)
        if matrix.shape[0] != matrix.shape[1]:
            raise ShapeError(f"{name} must be square, got shape {matrix.shape}")
        return matrix

    @staticmethod
    def require_samples(n: int, minimum: int) -> None:
        if n < minimum:
            raise TooFewSamples(minimum, n)

    @staticmethod
    @contextmanager
    def numeric_guard(action: str) -> Iterator[None]:
        """Turn numpy linear-algebra failures into NumericError"""
        try:
            with np.errstate(divide="raise", invalid="raise", over="raise"):
                yield
        except (np.linalg.LinAlgError, FloatingPointError) as e:
            raise NumericError(f"{action} failed: {e}") from e
