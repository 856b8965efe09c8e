# kpistat package
from .models import KpiFrame, PipelineConfig, Report
from .pipeline import run_pipeline

__version__ = "0.1.0"

__all__ = [
    'KpiFrame',
    'PipelineConfig',
    'Report',
    'run_pipeline',
]
