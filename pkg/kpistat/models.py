import math
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DuplicateLabel, EmptyDataset, NumericError, ShapeError


def _check_unique(labels: List[str]) -> None:
    seen = set()
    for label in labels:
        if label in seen:
            raise DuplicateLabel(label)
        seen.add(label)


# Dataset Models
class StandardizeMode(str, Enum):
    NONE = "none"
    ZSCORE = "zscore"
    UNIT_RANGE = "unit_range"


class ZeroVariancePolicy(str, Enum):
    ERROR = "error"
    DROP_COLUMN = "drop_column"


class StandardizeSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: StandardizeMode = StandardizeMode.ZSCORE
    zero_variance_policy: ZeroVariancePolicy = ZeroVariancePolicy.ERROR


class KpiFrame(BaseModel):
    """Labeled samples x variables matrix of KPI observations"""
    model_config = ConfigDict(frozen=True)

    sample_labels: List[str]
    variable_labels: List[str]
    units: List[str]
    values: List[List[float]]
    sample_column: str = "sample"

    @model_validator(mode="after")
    def _check_invariants(self) -> "KpiFrame":
        if not self.sample_labels:
            raise EmptyDataset()
        if len(self.units) != len(self.variable_labels):
            raise ShapeError(
                f"{len(self.units)} units for {len(self.variable_labels)} variables"
            )
        if len(self.values) != len(self.sample_labels):
            raise ShapeError(
                f"{len(self.values)} rows for {len(self.sample_labels)} sample labels"
            )
        for index, row in enumerate(self.values):
            if len(row) != len(self.variable_labels):
                raise ShapeError(
                    f"row {index} has {len(row)} values, expected {len(self.variable_labels)}"
                )
            if not all(math.isfinite(value) for value in row):
                raise NumericError(f"row {index} contains a non-finite value")
        _check_unique(self.sample_labels)
        _check_unique(self.variable_labels)
        return self

    @classmethod
    def from_matrix(
        cls,
        sample_labels: List[str],
        variable_labels: List[str],
        units: List[str],
        matrix: np.ndarray,
        sample_column: str = "sample",
    ) -> "KpiFrame":
        return cls(
            sample_labels=list(sample_labels),
            variable_labels=list(variable_labels),
            units=list(units),
            values=np.asarray(matrix, dtype=float).tolist(),
            sample_column=sample_column,
        )

    @property
    def n_samples(self) -> int:
        return len(self.sample_labels)

    @property
    def n_variables(self) -> int:
        return len(self.variable_labels)

    @property
    def matrix(self) -> np.ndarray:
        """Values as a fresh float array (n_samples x n_variables)"""
        return np.array(self.values, dtype=float).reshape(self.n_samples, self.n_variables)

    def column(self, label: str) -> np.ndarray:
        return self.matrix[:, self.variable_labels.index(label)]

    def value(self, sample: str, variable: str) -> float:
        return self.values[self.sample_labels.index(sample)][self.variable_labels.index(variable)]


class DatasetName(str, Enum):
    TABLE1_KPI = "table1_kpi"
    TABLE2_SERVICES = "table2_services"


class PublishedCorrelation(BaseModel):
    row: str
    column: str
    r: float


class CorrelationDiscrepancy(BaseModel):
    row: str
    column: str
    published: float
    computed: float

    @property
    def difference(self) -> float:
        return self.computed - self.published


class DatasetInfo(BaseModel):
    name: DatasetName
    title: str
    description: str
    n_samples: int
    n_variables: int
    aliases: Dict[str, str] = {}
    notes: List[str] = []
    # values printed alongside the source table, for comparison only
    published_correlations: List[PublishedCorrelation] = []
    published_mds_proportion: Optional[float] = None


# Distance Models
class MetricKind(str, Enum):
    EUCLIDEAN = "euclidean"
    SQUARED_EUCLIDEAN = "squared_euclidean"
    CITY_BLOCK = "city_block"
    CHEBYCHEV = "chebychev"
    POWER = "power"


class Metric(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: MetricKind = MetricKind.EUCLIDEAN
    p: Optional[float] = None  # power only
    r: Optional[float] = None  # power only

    @model_validator(mode="after")
    def _check_power_parameters(self) -> "Metric":
        if self.kind == MetricKind.POWER:
            if self.p is None or self.r is None:
                raise ValueError("power metric requires both p and r")
            if self.p <= 0 or self.r <= 0:
                raise ValueError("power metric parameters p and r must be positive")
        elif self.p is not None or self.r is not None:
            raise ValueError(f"p and r only apply to the power metric, not {self.kind.value}")
        return self


class DistanceMatrix(BaseModel):
    model_config = ConfigDict(frozen=True)

    labels: List[str]
    d: List[List[float]]

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.d, dtype=float).reshape(len(self.labels), len(self.labels))


# Clustering Models
class Linkage(str, Enum):
    COMPLETE = "complete"
    SINGLE = "single"
    AVERAGE = "average"


class Merge(BaseModel):
    left: int
    right: int
    height: float
    size: int


class Dendrogram(BaseModel):
    """Merge tree; node ids 0..n-1 are leaves, n..2n-2 internal nodes in merge order"""
    leaf_labels: List[str]
    merges: List[Merge]


class ClusterResult(BaseModel):
    linkage: Linkage
    k: int
    partition: Dict[str, int]
    dendrogram: Dendrogram
    newick: str


# Correlation Models
class CorrelationResult(BaseModel):
    variable_labels: List[str]
    r: List[List[float]]
    p: List[List[float]]
    q_min: List[List[float]]
    significant: List[List[bool]]
    n_samples: int

    def coefficient(self, first: str, second: str) -> float:
        return self.r[self.variable_labels.index(first)][self.variable_labels.index(second)]

    def p_value(self, first: str, second: str) -> float:
        return self.p[self.variable_labels.index(first)][self.variable_labels.index(second)]


# Ordination Models
class Embedding(BaseModel):
    labels: List[str]
    dim: int
    dim_max: int
    coordinates: List[List[float]]
    eigenvalues: List[float]
    cumulative_proportion: List[float]
    stress_by_dim: List[float]

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.coordinates, dtype=float).reshape(len(self.labels), self.dim)

    def proportion(self, m: int) -> float:
        """Share of the positive spectrum carried by the first m dimensions"""
        if not self.cumulative_proportion:
            return 0.0
        return self.cumulative_proportion[min(m, len(self.cumulative_proportion)) - 1]

    def stress(self, m: int) -> float:
        return self.stress_by_dim[m - 1]


class CaMap(str, Enum):
    """Which coordinates a CA joint display puts rows and columns in"""
    SYMMETRIC = "symmetric"                # both principal
    COLUMN_PRINCIPAL = "column_principal"  # rows standard, columns principal
    ROW_PRINCIPAL = "row_principal"        # rows principal, columns standard


class CaResult(BaseModel):
    row_labels: List[str]
    column_labels: List[str]
    row_masses: List[float]
    column_masses: List[float]
    row_coords: List[List[float]]
    col_coords: List[List[float]]
    principal_inertias: List[float]
    total_inertia: float

    @property
    def n_axes(self) -> int:
        return len(self.principal_inertias)

    @property
    def row_matrix(self) -> np.ndarray:
        return np.array(self.row_coords, dtype=float).reshape(len(self.row_labels), self.n_axes)

    @property
    def col_matrix(self) -> np.ndarray:
        return np.array(self.col_coords, dtype=float).reshape(len(self.column_labels), self.n_axes)


# Factor Analysis Models
class FactorMethod(str, Enum):
    PRINCIPAL = "principal"
    MAX_LIKELIHOOD = "max_likelihood"


class FactorModel(BaseModel):
    variable_labels: List[str]
    method: FactorMethod
    n_factors: int
    loadings: List[List[float]]
    uniquenesses: List[float]
    log_likelihood: Optional[float] = None
    log_likelihood_trace: List[float] = []
    converged: bool = True
    iterations: int = 0
    heywood: bool = False
    heywood_variables: List[str] = []

    @property
    def loading_matrix(self) -> np.ndarray:
        return np.array(self.loadings, dtype=float).reshape(
            len(self.variable_labels), self.n_factors
        )

    @property
    def communalities(self) -> np.ndarray:
        return np.sum(self.loading_matrix ** 2, axis=1)

    def implied_matrix(self) -> np.ndarray:
        """L L' + diag(omega)"""
        loadings = self.loading_matrix
        return loadings @ loadings.T + np.diag(self.uniquenesses)


# Pipeline Models
class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    SVG = "svg"


class Stage(str, Enum):
    CORRELATION = "correlation"
    CLUSTERING = "clustering"
    MDS = "mds"
    CA = "ca"
    FACTOR_ANALYSIS = "factor_analysis"


class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    input_path: Optional[str] = None
    builtin: Optional[DatasetName] = None
    standardize: StandardizeSpec = StandardizeSpec()
    metric: Metric = Metric()
    linkage: Linkage = Linkage.COMPLETE
    k_clusters: int = Field(default=5, ge=1)
    mds_dim: int = Field(default=2, ge=1)
    fa_factors: int = Field(default=2, ge=1)
    outputs: str = "reports"
    formats: List[OutputFormat] = [OutputFormat.JSON, OutputFormat.CSV, OutputFormat.SVG]
    stages: List[Stage] = list(Stage)
    ca_map: CaMap = CaMap.COLUMN_PRINCIPAL

    @model_validator(mode="after")
    def _check_dataset(self) -> "PipelineConfig":
        if (self.input_path is None) == (self.builtin is None):
            raise ValueError("exactly one of input_path or builtin must be given")
        return self

    @property
    def dataset(self) -> str:
        return self.builtin.value if self.builtin is not None else str(self.input_path)


class Finding(BaseModel):
    kind: str
    message: str
    labels: List[str]


class Report(BaseModel):
    config: PipelineConfig
    dataset: str
    n_samples: int
    n_variables: int
    correlation: Optional[CorrelationResult] = None
    clustering: Optional[ClusterResult] = None
    embedding: Optional[Embedding] = None
    ca: Optional[CaResult] = None
    factors: Optional[FactorModel] = None
    narrative: List[Finding] = []
