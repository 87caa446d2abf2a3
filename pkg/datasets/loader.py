"""
Dataset Loader
==============
Reads a Dataset from a builtin name or a UTF-8 CSV file.

CSV layouts (header row required, '.' decimal separator):

    univariate     group,y,V[,x1..xm]
    multivariate   group,y1..yp,v11..vpp,x1..xm     (v row-major)

Without x columns every group gets an intercept-only design (x_j = 1).
"""

import re
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from datasets.builtin import get_builtin, is_builtin
from model.errors import DatasetError, UspError
from model.types import Dataset, GroupObservation
from utils.logging_config import get_logger

logger = get_logger(__name__)

# Data row i (0-based) sits on file line i + 2
HEADER_LINES = 1


def load_dataset(source: Union[str, Path]) -> Dataset:
    """
    Load a builtin dataset by name, or parse a CSV file.

    Args:
        source: 'eight-schools', 'hospital-27', or a path

    Returns:
        Validated Dataset
    """
    if isinstance(source, str) and is_builtin(source):
        return get_builtin(source).dataset

    path = Path(source)
    if not path.exists():
        raise DatasetError(f"no builtin dataset or file named '{source}'")
    try:
        df = pd.read_csv(path, encoding='utf-8', skipinitialspace=True, dtype=str)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DatasetError(f"could not parse {path}: {e}") from e

    dataset = parse_dataset_frame(df, label=path.stem)
    logger.info(f"Loaded {dataset.k} groups (p={dataset.p}, m={dataset.m}) from {path}")
    return dataset


def _numbered_columns(columns: List[str], prefix: str) -> List[str]:
    pattern = re.compile(rf"^{prefix}(\d+)$")
    numbered = sorted(
        (int(match.group(1)), col) for col in columns if (match := pattern.match(col))
    )
    return [col for _, col in numbered]


def _layout(columns: List[str]):
    """(y columns, V columns, x columns, p) for the header."""
    x_cols = _numbered_columns(columns, "x")
    if "y" in columns:
        if "V" not in columns:
            raise DatasetError("univariate CSV needs columns group,y,V", line=1)
        return ["y"], ["V"], x_cols, 1

    y_cols = _numbered_columns(columns, "y")
    p = len(y_cols)
    if p == 0:
        raise DatasetError("CSV needs a y column or y1..yp columns", line=1)
    if y_cols != [f"y{i}" for i in range(1, p + 1)]:
        raise DatasetError(f"y columns must be y1..y{p}, got {y_cols}", line=1)
    v_cols = [f"v{a}{b}" for a in range(1, p + 1) for b in range(1, p + 1)]
    missing = [col for col in v_cols if col not in columns]
    if missing:
        raise DatasetError(f"missing covariance columns {missing}", line=1)
    return y_cols, v_cols, x_cols, p


def parse_dataset_frame(df: pd.DataFrame, label: str = "dataset") -> Dataset:
    """
    Build a Dataset from a string-typed DataFrame in one of the CSV layouts.

    Args:
        df: Raw rows, one per group
        label: Dataset label

    Returns:
        Validated Dataset
    """
    df.columns = [str(col).strip() for col in df.columns]
    columns = list(df.columns)
    if "group" not in columns:
        raise DatasetError("CSV needs a 'group' column", line=1)
    y_cols, v_cols, x_cols, p = _layout(columns)
    if x_cols and x_cols != [f"x{i}" for i in range(1, len(x_cols) + 1)]:
        raise DatasetError(f"x columns must be x1..xm, got {x_cols}", line=1)

    numeric_cols = y_cols + v_cols + x_cols
    groups = []
    for row_idx, row in enumerate(df.itertuples(index=False)):
        line = row_idx + HEADER_LINES + 1
        values = dict(zip(columns, row))
        try:
            numbers = {col: float(values[col]) for col in numeric_cols}
        except (TypeError, ValueError) as e:
            raise DatasetError(f"non-numeric value ({e})", line=line) from e
        if not all(np.isfinite(list(numbers.values()))):
            raise DatasetError("non-finite value", line=line)

        y = [numbers[col] for col in y_cols]
        V = np.array([numbers[col] for col in v_cols]).reshape(p, p)
        x = [numbers[col] for col in x_cols] if x_cols else [1.0]
        try:
            groups.append(GroupObservation(y=y, V=V, x=x))
        except UspError as e:
            raise DatasetError(f"group '{values['group']}': {e}", line=line, group=row_idx + 1) from e

    try:
        return Dataset(groups=groups, label=label)
    except DatasetError:
        raise
    except UspError as e:
        raise DatasetError(str(e)) from e
