# Analyzer package
from .base_analyzer import BaseAnalyzer
from .kpi_repository import KpiRepository
from .correlation_analyzer import CorrelationAnalyzer
from .distance_analyzer import DistanceAnalyzer
from .cluster_analyzer import ClusterAnalyzer
from .ordination_analyzer import OrdinationAnalyzer
from .factor_analyzer import FactorAnalyzer
from .numerics import svd, sym_eigen, student_t_two_sided_p

__all__ = [
    'BaseAnalyzer',
    'KpiRepository',
    'CorrelationAnalyzer',
    'DistanceAnalyzer',
    'ClusterAnalyzer',
    'OrdinationAnalyzer',
    'FactorAnalyzer',
    'svd',
    'sym_eigen',
    'student_t_two_sided_p',
]
