"""CSV ingestion and result-table output"""
import logging
import re
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from src.errors import MalformedRowError, MissingLabelColumnError, NonNumericCellError
from src.evaluation.datasets import LabeledDataset

logger = logging.getLogger(__name__)

_PARSER_LINE = re.compile(r"line (\d+)")


class CsvSchema(BaseModel):
    """How columns of a sample-per-row CSV map onto a LabeledDataset"""
    label_column: Optional[str] = Field(None, description="Column holding class or fault labels")
    drop_columns: list[str] = Field(default_factory=list, description="Columns ignored when present")
    label_map: dict[str, str] = Field(default_factory=dict, description="Raw label -> label rename")
    sample_column: Optional[str] = Field(None, description="Run-relative sample number column")
    normal_label: Optional[str] = Field(None, description="Label of fault-free operation")
    fault_onset: Optional[int] = Field(None, ge=0, description="Samples after this number are faulty")


WBCD_SCHEMA = CsvSchema(
    label_column="diagnosis",
    drop_columns=["id"],
    label_map={"B": "benign", "M": "malignant"},
)

TEP_SCHEMA = CsvSchema(
    label_column="faultNumber",
    drop_columns=["simulationRun"],
    sample_column="sample",
    normal_label="0",
    fault_onset=160,
)

SCHEMAS = {"wbcd": WBCD_SCHEMA, "tep": TEP_SCHEMA}


def _read_frame(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        line = int(match.group(1)) if match else None
        raise MalformedRowError(f"{path}: malformed row: {e}", line=line) from e
    except pd.errors.EmptyDataError as e:
        raise MalformedRowError(f"{path}: file has no header row", line=1) from e


def _first_cell(mask: np.ndarray) -> tuple[int, int]:
    row = int(np.flatnonzero(mask.any(axis=1))[0])
    return row, int(np.flatnonzero(mask[row])[0])


def _check_complete(frame: pd.DataFrame, path: Path) -> pd.DataFrame:
    """Strip cells; short rows and blank cells are malformed"""
    stripped = frame.apply(lambda col: col.str.strip())
    empty = (stripped.isna() | stripped.eq("")).to_numpy()
    if empty.any():
        row, col = _first_cell(empty)
        raise MalformedRowError(f"{path}: missing value in column {stripped.columns[col]!r}", line=row + 2)
    return stripped


def _numeric_block(frame: pd.DataFrame, path: Path) -> np.ndarray:
    """Parse feature cells, reporting the first bad cell by file line"""
    values = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        row, col = _first_cell(bad)
        raise NonNumericCellError(
            f"{path}: non-numeric value {frame.iat[row, col]!r} in column {frame.columns[col]!r}",
            line=row + 2,
        )
    return values


def load_csv(path, schema: Optional[CsvSchema] = None) -> LabeledDataset:
    """
    Read a header-first CSV with one sample per row into a LabeledDataset
    whose `train` holds every sample (D × rows).

    Raises:
        MalformedRowError: ragged or empty row, or a missing cell
        NonNumericCellError: a feature cell that is not a finite number
        MissingLabelColumnError: the schema's label column is absent
    """
    schema = schema or CsvSchema()
    path = Path(path)
    frame = _read_frame(path)
    frame.columns = [str(c).strip() for c in frame.columns]
    frame = _check_complete(frame.drop(columns=[c for c in schema.drop_columns if c in frame.columns]), path)

    labels = None
    if schema.label_column is not None:
        if schema.label_column not in frame.columns:
            raise MissingLabelColumnError(
                f"{path}: label column {schema.label_column!r} not in header {list(frame.columns)}",
                line=1,
            )
        labels = frame[schema.label_column].map(lambda v: schema.label_map.get(v, v)).to_numpy(dtype=str)

    index = None
    if schema.sample_column is not None and schema.sample_column in frame.columns:
        index = _numeric_block(frame[[schema.sample_column]], path)[:, 0].astype(np.int64)

    excluded = {schema.label_column, schema.sample_column}
    features = [c for c in frame.columns if c not in excluded]
    X = _numeric_block(frame[features], path)

    logger.info(f"Loaded {path.name}: {X.shape[0]} samples x {X.shape[1]} features")
    return LabeledDataset(
        train=X.T,
        train_labels=labels,
        train_index=index,
        fault_onset=schema.fault_onset,
        normal_label=schema.normal_label,
        feature_names=features,
    )


def write_table(frame: pd.DataFrame, path, fmt: str = "csv") -> Path:
    """Write a result table as CSV or JSON records"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        frame.to_csv(path, index=False)
    elif fmt == "json":
        frame.to_json(path, orient="records", indent=2)
    else:
        raise ValueError(f"unknown table format {fmt!r}")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path
