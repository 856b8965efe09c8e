import csv
import io
import json
import math
from typing import List, Sequence, Tuple

import numpy as np

from .base_analyzer import BaseAnalyzer
from .numerics import student_t_two_sided_p
from ..errors import ShapeError, ZeroVariance
from ..models import CorrelationDiscrepancy, CorrelationResult, KpiFrame, PublishedCorrelation

SIGNIFICANCE_LEVEL = 0.05
PERFECT_CORRELATION_TOLERANCE = 1e-12
PUBLISHED_TOLERANCE = 5e-3


class CorrelationAnalyzer(BaseAnalyzer):
    """Pearson correlation, the Q_min similarity functional and the significance table"""

    @staticmethod
    def _deviations(x: Sequence[float], y: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """Centered copies of x and y (means first, then deviations)"""
        x = CorrelationAnalyzer.as_vector(x, "x")
        y = CorrelationAnalyzer.as_vector(y, "y")
        if x.shape != y.shape:
            raise ShapeError(f"length mismatch: {x.size} vs {y.size}")
        CorrelationAnalyzer.require_samples(x.size, 2)
        if np.ptp(x) == 0.0:
            raise ZeroVariance("x")
        if np.ptp(y) == 0.0:
            raise ZeroVariance("y")
        return x - x.mean(), y - y.mean()

    @staticmethod
    def pearson(x: Sequence[float], y: Sequence[float]) -> float:
        dx, dy = CorrelationAnalyzer._deviations(x, y)
        r = float(np.dot(dx, dy) / math.sqrt(float(np.dot(dx, dx)) * float(np.dot(dy, dy))))
        return max(-1.0, min(1.0, r))

    @staticmethod
    def q_min(x: Sequence[float], y: Sequence[float]) -> float:
        """Minimal mean squared error of the least-squares line of y on x"""
        dx, dy = CorrelationAnalyzer._deviations(x, y)
        sxx, syy, sxy = float(np.dot(dx, dx)), float(np.dot(dy, dy)), float(np.dot(dx, dy))
        r_squared = min(1.0, sxy * sxy / (sxx * syy))
        return max(0.0, syy / dx.size * (1.0 - r_squared))

    @staticmethod
    def p_value(r: float, n: int) -> float:
        """Two-sided p-value of H0: rho = 0 via t = r * sqrt((n-2)/(1-r^2)), df = n-2"""
        if abs(r) >= 1.0 - PERFECT_CORRELATION_TOLERANCE:
            return 0.0
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        return student_t_two_sided_p(t, n - 2)

    @staticmethod
    def correlation_matrix(frame: KpiFrame) -> CorrelationResult:
        CorrelationAnalyzer.require_samples(frame.n_samples, 3)
        matrix = frame.matrix
        for j, label in enumerate(frame.variable_labels):
            if np.ptp(matrix[:, j]) == 0.0:
                raise ZeroVariance(label)

        n, p = frame.n_samples, frame.n_variables
        r = np.eye(p)
        p_values = np.zeros((p, p))
        q_min = np.zeros((p, p))
        for i in range(p):
            for j in range(i + 1, p):
                coefficient = CorrelationAnalyzer.pearson(matrix[:, i], matrix[:, j])
                r[i, j] = r[j, i] = coefficient
                p_values[i, j] = p_values[j, i] = CorrelationAnalyzer.p_value(coefficient, n)
                q_min[i, j] = CorrelationAnalyzer.q_min(matrix[:, i], matrix[:, j])
                q_min[j, i] = CorrelationAnalyzer.q_min(matrix[:, j], matrix[:, i])

        significant = (p_values < SIGNIFICANCE_LEVEL) & ~np.eye(p, dtype=bool)
        return CorrelationResult(
            variable_labels=list(frame.variable_labels),
            r=r.tolist(),
            p=p_values.tolist(),
            q_min=q_min.tolist(),
            significant=significant.tolist(),
            n_samples=n,
        )

    @staticmethod
    def to_table_text(result: CorrelationResult) -> str:
        """Lower-triangular coefficient table, one row per variable, labels last"""
        width = max(len(label) for label in result.variable_labels)
        lines = []
        for i, label in enumerate(result.variable_labels):
            cells = "  ".join(f"{result.r[i][j]:10.7f}" for j in range(i + 1))
            lines.append(f"{label:<{width}}  {cells}")
        lines.append(" " * width + "  " + "  ".join(f"{label[:10]:>10}" for label in result.variable_labels))
        return "\n".join(lines) + "\n"

    @staticmethod
    def to_csv(result: CorrelationResult, values: str = "r") -> str:
        """Labeled square matrix of coefficients ("r") or p-values ("p")"""
        matrix = result.r if values == "r" else result.p
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow([""] + result.variable_labels)
        for label, row in zip(result.variable_labels, matrix):
            writer.writerow([label] + [repr(float(value)) for value in row])
        return buffer.getvalue()

    @staticmethod
    def to_json(result: CorrelationResult) -> str:
        return json.dumps(
            {
                "labels": result.variable_labels,
                "r": result.r,
                "p": result.p,
                "n": result.n_samples,
            },
            indent=2,
        )

    @staticmethod
    def compare_published(
        result: CorrelationResult,
        published: Sequence[PublishedCorrelation],
        tolerance: float = PUBLISHED_TOLERANCE,
    ) -> List[CorrelationDiscrepancy]:
        """Published cells the computed matrix misses by more than `tolerance`"""
        labels = result.variable_labels
        discrepancies = []
        for cell in published:
            if cell.row not in labels or cell.column not in labels:
                raise ShapeError(f"published cell ({cell.row}, {cell.column}) names an unknown variable")
            computed = result.r[labels.index(cell.row)][labels.index(cell.column)]
            if abs(computed - cell.r) > tolerance:
                discrepancies.append(CorrelationDiscrepancy(
                    row=cell.row, column=cell.column, published=cell.r, computed=computed,
                ))
        return discrepancies
