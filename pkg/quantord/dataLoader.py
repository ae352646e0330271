import os
import numpy as np
import pandas as pd
from .errors import DataError, DomainError
from .logManager import getLogger
from .modelCore import OrdinalDataset

logger = getLogger(__name__)


def _numericColumn(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column].str.strip()
    values = pd.to_numeric(raw, errors="coerce").to_numpy(float)
    bad = ~np.isfinite(values)
    if bad.any():
        row = int(np.nonzero(bad)[0][0])
        raise DataError(
            f"Row {row + 1}, column '{column}': '{frame[column].iloc[row]}' is not a finite number.",
            {"row": row + 1, "line": row + 2, "column": column},
        )
    return values


def _relabel(values: np.ndarray, column: str) -> tuple:
    if np.any(values != np.round(values)):
        row = int(np.nonzero(values != np.round(values))[0][0])
        raise DataError(f"Row {row + 1}, column '{column}': response {values[row]:g} is not an integer category.",
                        {"row": row + 1, "line": row + 2, "column": column})
    levels = np.unique(values.astype(int))
    if levels.size < 2:
        raise DataError(f"Response '{column}' has a single category; an ordinal model needs at least two.",
                        {"column": column})
    y = np.searchsorted(levels, values.astype(int)) + 1
    mapping = {int(level): j + 1 for j, level in enumerate(levels)}
    if any(level != label for level, label in mapping.items()):
        logger.info(f"Relabelled response categories {mapping}.")
    return y, levels.size


def loadDataset(path: str, response: str = "y", covariates=None, intercept: bool = True) -> OrdinalDataset:
    """Read a UTF-8 comma-separated file with a header row into an ordinal dataset."""
    if not os.path.isfile(path):
        raise DataError(f"Data file '{path}' does not exist.", {"path": path})
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Could not parse '{path}': {e}", {"path": path}) from None

    if response not in frame.columns:
        raise DataError(f"Response column '{response}' not found.", {"column": response})
    covariates = list(covariates) if covariates else [c for c in frame.columns if c != response]
    for column in covariates:
        if column not in frame.columns:
            raise DataError(f"Covariate column '{column}' not found.", {"column": column})

    y, J = _relabel(_numericColumn(frame, response), response)
    columns = [_numericColumn(frame, column) for column in covariates]
    names = list(covariates)
    if intercept:
        columns.insert(0, np.ones(len(frame)))
        names.insert(0, "intercept")
    if not columns:
        raise DataError("No covariates selected.")

    X = np.column_stack(columns)
    if X.shape[0] < X.shape[1]:
        raise DataError(f"{X.shape[0]} rows is fewer than the {X.shape[1]} covariate columns.",
                        {"rows": X.shape[0], "columns": X.shape[1]})
    try:
        return OrdinalDataset(X, y, J, tuple(names), response)
    except DomainError as e:
        raise DataError(e.message, e.details) from None
