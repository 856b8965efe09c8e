import csv
import io
import logging
import re
from functools import lru_cache
from importlib import resources
from typing import List, TextIO, Tuple, Union

import numpy as np

from .base_analyzer import BaseAnalyzer
from ..errors import EmptyDataset, ParseError, UnknownDataset, ZeroVariance
from ..models import (
    DatasetInfo, DatasetName, KpiFrame, PublishedCorrelation, StandardizeMode, StandardizeSpec,
    ZeroVariancePolicy,
)

logger = logging.getLogger(__name__)

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_UNIT_SUFFIX = re.compile(r"^(.*?)\s*\(([^()]*)\)\s*$")

# lower triangle of the published service correlation table, row variable first
_SERVICE_CORRELATIONS = [
    ("Throughput", "Latency", 0.9837184),
    ("Packet Losses", "Latency", 0.6901798),
    ("Packet Losses", "Throughput", 0.6891368),
    ("Web service", "Latency", 0.7485133),
    ("Web service", "Throughput", 0.7612625),
    ("Web service", "Packet Losses", 0.3635971),
    ("Voice", "Latency", 0.6506331),
    ("Voice", "Throughput", 0.6358085),
    ("Voice", "Packet Losses", 0.4987593),
    ("Voice", "Web service", 0.3042882),
    ("FTP", "Latency", 0.7698489),
    ("FTP", "Throughput", 0.7523677),
    ("FTP", "Packet Losses", 0.6265178),
    ("FTP", "Web service", 0.5686828),
    ("FTP", "Voice", 0.4397341),
    ("E-mail", "Latency", 0.1698499),
    ("E-mail", "Throughput", 0.2191700),
    ("E-mail", "Packet Losses", 0.3366617),
    ("E-mail", "Web service", 0.2943249),
    ("E-mail", "Voice", 0.3575749),
    ("E-mail", "FTP", 0.1519382),
    ("Video", "Latency", 0.8914506),
    ("Video", "Throughput", 0.8857731),
    ("Video", "Packet Losses", 0.8393494),
    ("Video", "Web service", 0.5322320),
    ("Video", "Voice", 0.6656175),
    ("Video", "FTP", 0.7937543),
    ("Video", "E-mail", 0.2991514),
]

DATASETS = {
    DatasetName.TABLE1_KPI: DatasetInfo(
        name=DatasetName.TABLE1_KPI,
        title="KPI data",
        description="Hourly QoS KPIs of a trial UMTS PS network: GGSN utilization, "
                    "Gn and Gi interface packet loss, latency and Gi throughput.",
        n_samples=20,
        n_variables=5,
        notes=[
            "The first sample period is printed as 'Hour 1' in the source table; "
            "it is labelled 'Hr 1' like the other periods.",
            "Zero packet-loss cells mean a loss below the fifth decimal place.",
        ],
        published_mds_proportion=0.8215,
    ),
    DatasetName.TABLE2_SERVICES: DatasetInfo(
        name=DatasetName.TABLE2_SERVICES,
        title="Sample data from the trial UMTS PS network",
        description="Twenty one-minute samples of three QoS parameters (latency, throughput, "
                    "packet losses) and five service throughputs (web, voice, FTP, e-mail, video).",
        n_samples=20,
        n_variables=8,
        aliases={"Audio": "Voice"},
        notes=[
            "The correlation output names the voice column 'Audio'; both refer to the same variable.",
            "The source gives no unit for E-mail; 'Mbps' is assumed by analogy with the other services.",
            "Twenty of 480 recorded samples; the remaining rows were never published.",
        ],
        published_correlations=[
            PublishedCorrelation(row=row, column=column, r=r) for row, column, r in _SERVICE_CORRELATIONS
        ],
    ),
}


class KpiRepository(BaseAnalyzer):
    """Repository for KPI datasets: CSV ingestion, serialization, scaling and builtins"""

    @staticmethod
    def _parse_header_cell(cell: str) -> Tuple[str, str]:
        match = _UNIT_SUFFIX.match(cell.strip())
        if match and match.group(1):
            return match.group(1), match.group(2).strip()
        return cell.strip(), ""

    @staticmethod
    def load_csv(text: Union[str, TextIO]) -> KpiFrame:
        """
        Parse a KPI CSV document.

        The header's first cell names the sample-label column; the remaining cells are
        variable labels with an optional "(unit)" suffix. Every other row is one sample.
        """
        content = text if isinstance(text, str) else text.read()
        if content.startswith("\ufeff"):
            content = content[1:]
        rows = [(line_no, row) for line_no, row in enumerate(csv.reader(io.StringIO(content)), start=1)
                if any(cell.strip() for cell in row)]
        if not rows:
            raise EmptyDataset("CSV document is empty")

        _, header = rows[0]
        if len(header) < 2:
            raise ParseError("header must name at least one variable", row=1)
        parsed = [KpiRepository._parse_header_cell(cell) for cell in header[1:]]
        variable_labels = [label for label, _ in parsed]
        units = [unit for _, unit in parsed]

        sample_labels: List[str] = []
        values: List[List[float]] = []
        for line_no, row in rows[1:]:
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} cells, found {len(row)}", row=line_no)
            sample_labels.append(row[0].strip())
            parsed_row = []
            for column, cell in enumerate(row[1:], start=2):
                cell = cell.strip()
                if not _NUMBER.match(cell):
                    raise ParseError(f"'{cell}' is not a number", row=line_no, column=column)
                parsed_row.append(float(cell))
            values.append(parsed_row)

        if not values:
            raise EmptyDataset("CSV document has a header but no samples")

        frame = KpiFrame(
            sample_labels=sample_labels,
            variable_labels=variable_labels,
            units=units,
            values=values,
            sample_column=header[0].strip(),
        )
        logger.debug("Loaded %d samples x %d variables", frame.n_samples, frame.n_variables)
        return frame

    @staticmethod
    def serialize(frame: KpiFrame) -> str:
        """Write a frame in the canonical CSV form accepted by load_csv"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(
            [frame.sample_column]
            + [f"{label} ({unit})" if unit else label
               for label, unit in zip(frame.variable_labels, frame.units)]
        )
        for label, row in zip(frame.sample_labels, frame.values):
            writer.writerow([label] + [repr(float(value)) for value in row])
        return buffer.getvalue()

    @staticmethod
    def standardize(frame: KpiFrame, spec: StandardizeSpec = StandardizeSpec()) -> KpiFrame:
        """Scale every column: z-score (sample sd, n-1) or affine map onto [0, 1]"""
        if spec.mode == StandardizeMode.NONE:
            return frame
        if spec.mode == StandardizeMode.ZSCORE:
            KpiRepository.require_samples(frame.n_samples, 2)

        matrix = frame.matrix
        kept_columns, scaled = [], []
        for j, label in enumerate(frame.variable_labels):
            column = matrix[:, j]
            if spec.mode == StandardizeMode.ZSCORE:
                center, spread = column.mean(), column.std(ddof=1)
            else:
                center, spread = column.min(), column.max() - column.min()
            if spread == 0.0:
                if spec.zero_variance_policy == ZeroVariancePolicy.ERROR:
                    raise ZeroVariance(label)
                logger.warning("Dropping zero-variance column '%s'", label)
                continue
            kept_columns.append(j)
            scaled.append((column - center) / spread)

        if not kept_columns:
            raise EmptyDataset("every column has zero variance")
        return KpiFrame.from_matrix(
            frame.sample_labels,
            [frame.variable_labels[j] for j in kept_columns],
            [frame.units[j] for j in kept_columns],
            np.column_stack(scaled),
            sample_column=frame.sample_column,
        )

    @staticmethod
    @lru_cache(maxsize=None)
    def builtin_dataset(name: Union[DatasetName, str]) -> KpiFrame:
        """Load one of the embedded datasets (frames are immutable, so cached)"""
        return KpiRepository.load_csv(KpiRepository.builtin_text(name))

    @staticmethod
    def builtin_text(name: Union[DatasetName, str]) -> str:
        """Raw fixture text of a builtin dataset"""
        try:
            dataset = DatasetName(name)
        except ValueError:
            raise UnknownDataset(str(name))
        fixture = resources.files("kpistat").joinpath("data").joinpath(f"{dataset.value}.csv")
        return fixture.read_text(encoding="utf-8")

    @staticmethod
    def list_datasets() -> List[DatasetInfo]:
        return list(DATASETS.values())

    @staticmethod
    def dataset_info(name: Union[DatasetName, str]) -> DatasetInfo:
        try:
            return DATASETS[DatasetName(name)]
        except ValueError:
            raise UnknownDataset(str(name))
