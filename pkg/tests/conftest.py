import os

import numpy as np
import pytest

from kpistat.analyzers import KpiRepository
from kpistat.models import DatasetName, StandardizeMode, StandardizeSpec


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep KPISTAT_* settings from the developer's shell out of the tests"""
    for name in list(os.environ):
        if name.startswith("KPISTAT_"):
            monkeypatch.delenv(name)


@pytest.fixture
def table1():
    return KpiRepository.builtin_dataset(DatasetName.TABLE1_KPI)


@pytest.fixture
def table2():
    return KpiRepository.builtin_dataset(DatasetName.TABLE2_SERVICES)


@pytest.fixture
def table1_zscored(table1):
    return KpiRepository.standardize(table1, StandardizeSpec())


@pytest.fixture
def table1_unit_range(table1):
    return KpiRepository.standardize(table1, StandardizeSpec(mode=StandardizeMode.UNIT_RANGE))


@pytest.fixture
def rng():
    return np.random.default_rng(20240117)


