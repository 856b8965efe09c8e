import pytest
from pydantic import ValidationError

from kpistat.config import Settings, get_settings
from kpistat.models import CaMap, Linkage, MetricKind, OutputFormat, StandardizeMode


def test_defaults():
    settings = get_settings()
    assert settings == Settings()
    assert settings.k == 5 and settings.dim == 2 and settings.factors == 2
    assert settings.standardize == StandardizeMode.ZSCORE
    assert settings.ca_map == CaMap.COLUMN_PRINCIPAL
    assert settings.formats == [OutputFormat.JSON, OutputFormat.CSV, OutputFormat.SVG]


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("KPISTAT_K", "3")
    monkeypatch.setenv("KPISTAT_LINKAGE", "average")
    monkeypatch.setenv("KPISTAT_METRIC", "city_block")
    monkeypatch.setenv("KPISTAT_FORMATS", "json, svg")
    monkeypatch.setenv("KPISTAT_LOG_LEVEL", "debug")
    monkeypatch.setenv("KPISTAT_OUTPUT_DIR", "/tmp/kpi")
    monkeypatch.setenv("KPISTAT_CA_MAP", "symmetric")
    settings = get_settings()
    assert settings.k == 3
    assert settings.linkage == Linkage.AVERAGE
    assert settings.metric == MetricKind.CITY_BLOCK
    assert settings.formats == [OutputFormat.JSON, OutputFormat.SVG]
    assert settings.log_level == "DEBUG"
    assert settings.output_dir == "/tmp/kpi"
    assert settings.ca_map == CaMap.SYMMETRIC


def test_blank_variables_keep_defaults(monkeypatch):
    monkeypatch.setenv("KPISTAT_K", "  ")
    assert get_settings().k == 5


@pytest.mark.parametrize("name, value", [
    ("KPISTAT_K", "0"),
    ("KPISTAT_METRIC", "manhattan"),
    ("KPISTAT_FORMATS", "json,xml"),
    ("KPISTAT_CA_MAP", "unit_range"),
])
def test_invalid_values(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValidationError):
        get_settings()
