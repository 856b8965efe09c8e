import csv
import io
from typing import Sequence

import numpy as np

from .base_analyzer import BaseAnalyzer
from ..errors import ShapeError
from ..models import DistanceMatrix, KpiFrame, Metric, MetricKind


class DistanceAnalyzer(BaseAnalyzer):
    """Pairwise dissimilarities between sample periods"""

    @staticmethod
    def distance(x: Sequence[float], y: Sequence[float], metric: Metric = Metric()) -> float:
        x = DistanceAnalyzer.as_vector(x, "x")
        y = DistanceAnalyzer.as_vector(y, "y")
        if x.shape != y.shape:
            raise ShapeError(f"dimension mismatch: {x.size} vs {y.size}")
        if x.size == 0:
            raise ShapeError("vectors must have at least one dimension")

        difference = np.abs(x - y)
        if metric.kind == MetricKind.EUCLIDEAN:
            return float(np.sqrt(np.sum(difference ** 2)))
        if metric.kind == MetricKind.SQUARED_EUCLIDEAN:
            return float(np.sum(difference ** 2))
        if metric.kind == MetricKind.CITY_BLOCK:
            # averaged over dimensions, not the plain Manhattan sum
            return float(np.sum(difference) / difference.size)
        if metric.kind == MetricKind.CHEBYCHEV:
            return float(np.max(difference))
        return float(np.sum(difference ** metric.p) ** (1.0 / metric.r))

    @staticmethod
    def distance_matrix(frame: KpiFrame, metric: Metric = Metric()) -> DistanceMatrix:
        DistanceAnalyzer.require_samples(frame.n_samples, 2)
        rows = frame.matrix
        n = frame.n_samples
        d = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                d[i, j] = d[j, i] = DistanceAnalyzer.distance(rows[i], rows[j], metric)
        return DistanceMatrix(labels=list(frame.sample_labels), d=d.tolist())

    @staticmethod
    def to_csv(matrix: DistanceMatrix) -> str:
        """Labeled square matrix with an empty corner cell"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow([""] + matrix.labels)
        for label, row in zip(matrix.labels, matrix.d):
            writer.writerow([label] + [repr(value) for value in row])
        return buffer.getvalue()
