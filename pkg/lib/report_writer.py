"""
Report artifacts for command runs.

Every command writes one JSON report and, where it produces a table, a CSV
next to it. Output is deterministic: no timestamps, fixed key order, fixed
float formatting, so identical runs give byte-identical files.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd

from lib.utils import to_jsonable

logger = logging.getLogger(__name__)

# CSV floats keep full double precision
CSV_FLOAT_FORMAT = '%.17g'


def _prepare(path: Union[str, Path]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def write_json_report(path: Union[str, Path], report: Dict[str, Any]) -> Path:
    """
    Write ``report`` as UTF-8 JSON (numpy values and complex numbers converted).

    Returns:
        Path of the written file
    """
    target = _prepare(path)
    try:
        text = json.dumps(to_jsonable(report), indent=2, ensure_ascii=False, allow_nan=False)
        target.write_text(text + '\n', encoding='utf-8')
    except Exception as e:
        logger.error(f"Failed to write report {target}: {e}", exc_info=True)
        raise
    logger.info(f"Wrote report {target}")
    return target


def write_table(path: Union[str, Path], table: pd.DataFrame) -> Path:
    """Write a table as CSV with a header row and ``.`` as the decimal mark."""
    target = _prepare(path)
    try:
        table.to_csv(target, index=False, float_format=CSV_FLOAT_FORMAT, encoding='utf-8', lineterminator='\n')
    except Exception as e:
        logger.error(f"Failed to write table {target}: {e}", exc_info=True)
        raise
    logger.info(f"Wrote table {target} ({len(table)} rows)")
    return target


def table_path_for(report_path: Union[str, Path], suffix: Optional[str] = None) -> Path:
    """CSV path that sits next to a JSON report: ``out.json`` -> ``out.csv`` (or ``out_<suffix>.csv``)."""
    report = Path(report_path)
    stem = report.stem if suffix is None else f"{report.stem}_{suffix}"
    return report.with_name(stem + '.csv')


def read_json_report(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, 'r', encoding='utf-8') as handle:
        return json.load(handle)
