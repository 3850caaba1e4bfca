"""Long-format CSV files of matrix series.

The file has the header ``t,row,col,value`` and one line per entry of each
frame, ``t`` starting at 1. The entries of a frame are written column by
column and followed by the transition value, stored as
``t,__s__,,value``. Floats use 17 significant digits so that a series read
back is bitwise identical.
"""
from pathlib import Path

import numpy as np
import pandas as pd

from ..tensor import MatrixSeries
from ..exceptions import SeriesFormatError
from .files_utils import atomic_write_text

SERIES_COLUMNS = ['t', 'row', 'col', 'value']
TRANSITION_LABEL = '__s__'
FLOAT_FORMAT = '%.17g'


def series_to_frame(series):
    "Canonical long ``DataFrame`` of a series."
    T, m, n = series.frames.shape
    has_s = series.transition is not None
    records = []
    for t in range(T):
        for j in range(n):
            for i in range(m):
                records.append((t + 1, series.row_labels[i],
                                series.col_labels[j],
                                float(series.frames[t, i, j])))
        if has_s:
            records.append((t + 1, TRANSITION_LABEL, '',
                            float(series.transition[t])))
    return pd.DataFrame.from_records(records, columns=SERIES_COLUMNS)


def write_series(series, path):
    """Write a series in the canonical long CSV format.

    Returns
    -------
    path : Path
        Path of the written file.
    """
    df = series_to_frame(series)
    text = df.to_csv(index=False, float_format=FLOAT_FORMAT,
                     lineterminator='\n')
    return atomic_write_text(path, text)


def _error(path, msg, line=None):
    where = f"{path}" if line is None else f"{path}, line {line}"
    return SeriesFormatError(f"{where}: {msg}")


def _parse_float(value, path, line):
    try:
        x = float(value)
    except ValueError:
        raise _error(path, f"non-numeric value '{value}'.", line) from None
    if not np.isfinite(x):
        raise _error(path, f"non-finite value '{value}'.", line)
    return x


def read_series(path):
    """Read a series written in the long CSV format.

    Rows and columns are ordered by first appearance in the file. Malformed
    files are rejected: missing or duplicated cells, non-contiguous ``t``,
    non-numeric values or a partial transition.

    Parameters
    ----------
    path : str | Path
        Path of the CSV file.

    Returns
    -------
    series : MatrixSeries
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError,
            UnicodeDecodeError) as e:
        raise _error(path, f"could not parse the CSV file: {e}") from e

    if list(df.columns) != SERIES_COLUMNS:
        raise _error(path, f"header should be {','.join(SERIES_COLUMNS)}. "
                     f"Got {','.join(map(str, df.columns))}.", 1)
    if df.empty:
        raise _error(path, "the file contains no frame.")

    cells, transition = {}, {}
    row_labels, col_labels = {}, {}
    for idx, (t, row, col, value) in enumerate(df.itertuples(index=False)):
        line = idx + 2
        if not t.isdigit() or int(t) < 1:
            raise _error(path, f"t should be an integer >= 1. Got '{t}'.",
                         line)
        t = int(t)
        x = _parse_float(value, path, line)
        if row == TRANSITION_LABEL:
            if col != '':
                raise _error(path, "transition rows should have an empty "
                             "column label.", line)
            if t in transition:
                raise _error(path, f"duplicate transition value for t={t}.",
                             line)
            transition[t] = x
            continue
        if (t, row, col) in cells:
            raise _error(path, f"duplicate cell (t={t}, {row}, {col}).",
                         line)
        cells[t, row, col] = x
        row_labels.setdefault(row, len(row_labels))
        col_labels.setdefault(col, len(col_labels))

    times = sorted({t for t, _, _ in cells} | set(transition))
    T = len(times)
    if times != list(range(1, T + 1)):
        missing = sorted(set(range(1, times[-1] + 1)) - set(times))
        raise _error(path, f"t values should be contiguous from 1. Missing "
                     f"t={missing[:5]}.")

    m, n = len(row_labels), len(col_labels)
    if m == 0:
        raise _error(path, "the file contains no matrix entry.")
    frames = np.empty((T, m, n))
    for t in range(1, T + 1):
        for col, j in col_labels.items():
            for row, i in row_labels.items():
                try:
                    frames[t - 1, i, j] = cells[t, row, col]
                except KeyError:
                    raise _error(
                        path, f"missing cell (t={t}, {row}, {col})."
                    ) from None

    s = None
    if transition:
        missing = [t for t in range(1, T + 1) if t not in transition]
        if missing:
            raise _error(path, f"missing transition value for t={missing[0]}"
                         f" ({len(missing)} missing).")
        s = np.array([transition[t] for t in range(1, T + 1)])

    return MatrixSeries(
        frames, s, tuple(row_labels), tuple(col_labels),
        metadata={'source_path': str(path)},
    )
