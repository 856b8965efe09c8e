"""
Runtime configuration.

Values come from KPISTAT_* environment variables (optionally via a .env file);
CLI flags override them. See CONFIGURATION.md.
"""
import os
from typing import List

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

from .models import CaMap, Linkage, MetricKind, OutputFormat, StandardizeMode, ZeroVariancePolicy

load_dotenv()


class Settings(BaseModel):
    output_dir: str = "reports"
    formats: List[OutputFormat] = [OutputFormat.JSON, OutputFormat.CSV, OutputFormat.SVG]
    standardize: StandardizeMode = StandardizeMode.ZSCORE
    zero_variance: ZeroVariancePolicy = ZeroVariancePolicy.ERROR
    metric: MetricKind = MetricKind.EUCLIDEAN
    linkage: Linkage = Linkage.COMPLETE
    k: int = Field(default=5, ge=1)
    dim: int = Field(default=2, ge=1)
    factors: int = Field(default=2, ge=1)
    ca_map: CaMap = CaMap.COLUMN_PRINCIPAL
    log_level: str = "INFO"

    @field_validator("formats", mode="before")
    @classmethod
    def _split_formats(cls, value):
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    @field_validator("log_level")
    @classmethod
    def _upper_log_level(cls, value: str) -> str:
        return value.upper()


ENV_PREFIX = "KPISTAT_"


def get_settings() -> Settings:
    """Build settings from the environment; unset variables keep their defaults"""
    overrides = {}
    for field_name in Settings.model_fields:
        raw = os.getenv(f"{ENV_PREFIX}{field_name.upper()}")
        if raw is not None and raw.strip():
            overrides[field_name] = raw.strip()
    return Settings(**overrides)
