"""
Dataset initialization.
Writes the builtin KPI tables to a directory as CSV files if they don't exist.
"""
import logging
from pathlib import Path
from typing import List, Union

from .analyzers import KpiRepository
from .models import DatasetName

logger = logging.getLogger(__name__)


def dataset_exists(directory: Path, name: DatasetName) -> bool:
    """Check if a dataset file is already present"""
    return (directory / f"{name.value}.csv").is_file()


def export_datasets(directory: Union[str, Path]) -> List[Path]:
    """Export every builtin dataset that is missing; existing files are left untouched"""
    directory = Path(directory)
    logger.info("🚀 Exporting builtin datasets to %s", directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error("❌ Error creating %s: %s", directory, e)
        raise

    written: List[Path] = []
    for name in DatasetName:
        path = directory / f"{name.value}.csv"
        if dataset_exists(directory, name):
            logger.info("Dataset '%s' already present, skipping", name.value)
            continue
        path.write_text(KpiRepository.builtin_text(name), encoding="utf-8", newline="\n")
        written.append(path)
        logger.info("✅ Created %s", path)

    logger.info("✅ Dataset export complete (%d written)", len(written))
    return written
