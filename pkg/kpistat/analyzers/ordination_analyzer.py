"""
Low-dimensional views of a KPI dataset.

Classical (Torgerson) scaling embeds a distance matrix through the spectrum of
the doubly-centered squared distances; correspondence analysis decomposes the
standardized residuals of a nonnegative table into joint row/column maps.
"""
import csv
import io
import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .base_analyzer import BaseAnalyzer
from .cluster_analyzer import ClusterAnalyzer
from .numerics import svd, sym_eigen
from ..errors import DegenerateMargin, DomainError, ShapeError
from ..models import CaMap, CaResult, DistanceMatrix, Embedding, KpiFrame

logger = logging.getLogger(__name__)

# eigenvalues at or below this fraction of the largest magnitude count as zero
POSITIVE_EIGENVALUE_TOLERANCE = 1e-10
DEFAULT_STRESS_DIMENSIONS = 5


class OrdinationAnalyzer(BaseAnalyzer):
    """Classical multidimensional scaling and correspondence analysis"""

    @staticmethod
    def _principal_coordinates(distances: np.ndarray):
        n = distances.shape[0]
        centering = np.eye(n) - np.full((n, n), 1.0 / n)
        b = -0.5 * centering @ (distances ** 2) @ centering
        eigen = sym_eigen((b + b.T) / 2.0)
        eigenvalues = eigen.eigenvalues
        largest = float(np.max(np.abs(eigenvalues))) if n else 0.0
        positive = eigenvalues > POSITIVE_EIGENVALUE_TOLERANCE * largest
        coordinates = np.zeros((n, n))
        coordinates[:, positive] = eigen.eigenvectors[:, positive] * np.sqrt(eigenvalues[positive])
        return eigenvalues, positive, coordinates

    @staticmethod
    def classical_mds(
        distances: DistanceMatrix, dim: int = 2, dim_max: Optional[int] = None
    ) -> Embedding:
        d = ClusterAnalyzer.validate(distances)
        n = d.shape[0]
        if not 1 <= dim <= n - 1:
            raise DomainError(f"dim must be between 1 and {n - 1}, got {dim}")
        if dim_max is None:
            dim_max = min(n - 1, max(dim, DEFAULT_STRESS_DIMENSIONS))
        if not dim <= dim_max <= n - 1:
            raise DomainError(f"dim_max must be between {dim} and {n - 1}, got {dim_max}")

        eigenvalues, positive, coordinates = OrdinationAnalyzer._principal_coordinates(d)
        positive_values = eigenvalues[positive]
        total = float(np.sum(positive_values))
        cumulative = (np.cumsum(positive_values) / total).tolist() if total > 0 else []
        if cumulative:
            cumulative[-1] = 1.0

        stress_by_dim = []
        if np.any(d):
            stress_by_dim = [
                OrdinationAnalyzer.stress(distances, coordinates[:, :m]) for m in range(1, dim_max + 1)
            ]
        else:
            logger.warning("All distances are zero; stress is undefined")

        return Embedding(
            labels=list(distances.labels),
            dim=dim,
            dim_max=dim_max,
            coordinates=coordinates[:, :dim].tolist(),
            eigenvalues=eigenvalues.tolist(),
            cumulative_proportion=cumulative,
            stress_by_dim=stress_by_dim,
        )

    @staticmethod
    def stress(distances: DistanceMatrix, coordinates) -> float:
        """Kruskal stress-1 of an embedding against the original distances"""
        d = OrdinationAnalyzer.as_square(distances.d, "distance matrix")
        points = OrdinationAnalyzer.as_matrix(coordinates, "coordinates")
        if points.shape[0] != d.shape[0]:
            raise ShapeError(f"{points.shape[0]} points for {d.shape[0]} distances")
        if points.shape[1] < 1:
            raise ShapeError("coordinates need at least one dimension")

        upper = np.triu_indices(d.shape[0], k=1)
        original = d[upper]
        denominator = float(np.sum(original ** 2))
        if denominator == 0.0:
            raise DomainError("stress is undefined when all distances are zero")
        differences = points[:, None, :] - points[None, :, :]
        embedded = np.sqrt(np.sum(differences ** 2, axis=-1))[upper]
        return float(np.sqrt(np.sum((original - embedded) ** 2) / denominator))

    @staticmethod
    def correspondence(frame: KpiFrame) -> CaResult:
        x = frame.matrix
        if np.any(x < 0):
            raise DomainError("CA requires nonnegative values")
        for label, total in zip(frame.sample_labels, x.sum(axis=1)):
            if total <= 0:
                raise DegenerateMargin(label)
        for label, total in zip(frame.variable_labels, x.sum(axis=0)):
            if total <= 0:
                raise DegenerateMargin(label)

        proportions = x / x.sum()
        row_masses = proportions.sum(axis=1)
        column_masses = proportions.sum(axis=0)
        expected = np.outer(row_masses, column_masses)
        residuals = (proportions - expected) / np.sqrt(expected)

        decomposition = svd(residuals)
        # centering removes one dimension
        n_axes = max(1, min(x.shape) - 1)
        singular_values = decomposition.singular_values[:n_axes]
        row_coords = (decomposition.u[:, :n_axes] * singular_values) / np.sqrt(row_masses)[:, None]
        col_coords = (decomposition.v[:, :n_axes] * singular_values) / np.sqrt(column_masses)[:, None]

        return CaResult(
            row_labels=list(frame.sample_labels),
            column_labels=list(frame.variable_labels),
            row_masses=row_masses.tolist(),
            column_masses=column_masses.tolist(),
            row_coords=row_coords.tolist(),
            col_coords=col_coords.tolist(),
            principal_inertias=(singular_values ** 2).tolist(),
            total_inertia=float(np.sum(residuals ** 2)),
        )

    @staticmethod
    def joint_map(
        ca: CaResult, joint_map: CaMap = CaMap.COLUMN_PRINCIPAL, dims: int = 2
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Row and column points of the first `dims` axes in the chosen joint display"""
        dims = min(dims, ca.n_axes)
        rows = ca.row_matrix[:, :dims]
        columns = ca.col_matrix[:, :dims]
        singular_values = np.sqrt(np.array(ca.principal_inertias[:dims]))
        # principal -> standard coordinates; a zero axis stays at the origin
        to_standard = np.divide(
            1.0, singular_values, out=np.zeros_like(singular_values), where=singular_values > 0
        )
        if joint_map == CaMap.COLUMN_PRINCIPAL:
            rows = rows * to_standard
        elif joint_map == CaMap.ROW_PRINCIPAL:
            columns = columns * to_standard
        return rows, columns

    @staticmethod
    def nearest_columns(
        ca: CaResult, dims: int = 2, joint_map: CaMap = CaMap.COLUMN_PRINCIPAL
    ) -> Dict[str, str]:
        """Nearest column point for every row point in the first `dims` axes of the joint display"""
        rows, columns = OrdinationAnalyzer.joint_map(ca, joint_map, dims)
        nearest = {}
        for label, point in zip(ca.row_labels, rows):
            gaps = np.sum((columns - point) ** 2, axis=1)
            nearest[label] = ca.column_labels[int(np.argmin(gaps))]
        return nearest

    @staticmethod
    def coordinates_csv(labels: Sequence[str], coordinates) -> str:
        """One row per point: label, dim1, dim2, ..."""
        points = OrdinationAnalyzer.as_matrix(coordinates, "coordinates")
        if points.shape[0] != len(labels):
            raise ShapeError(f"{points.shape[0]} points for {len(labels)} labels")
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["label"] + [f"dim{j + 1}" for j in range(points.shape[1])])
        for label, point in zip(labels, points):
            writer.writerow([label] + [repr(float(value)) for value in point])
        return buffer.getvalue()
