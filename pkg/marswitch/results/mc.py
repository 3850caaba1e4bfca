"""Files of Monte Carlo results: rows in CSV or parquet, summary in JSON."""
import warnings
from pathlib import Path

import numpy as np
import pandas as pd

from ..runner import McResultRow
from ..exceptions import SeriesFormatError
from .parquet import to_parquet
from .parquet import read_parquet
from .fits import dump_json
from .files_utils import uniquify_fname
from .files_utils import atomic_write_text

MC_SCHEMA_VERSION = 1
MC_COLUMNS = [
    'replication', 'estimator', 'frob_regime1', 'frob_regime2', 'c_hat',
    'gamma_hat', 'seconds', 'converged', 'status', 'seed',
]
FLOAT_FORMAT = '%.17g'


def rows_to_frame(rows):
    df = pd.DataFrame([row.to_dict() for row in rows], columns=MC_COLUMNS)
    df['seed'] = df['seed'].astype('Int64')
    return df


def write_mc(rows, path, uniquify=False):
    """Write Monte Carlo rows, one per line with a fixed header.

    The format follows the suffix of ``path``: ``.csv`` (canonical, with a
    ``schema_version`` column) or ``.parquet`` (schema version stored in the
    file metadata). Missing values are empty fields in CSV.

    Returns
    -------
    path : Path
        Path of the written file.
    """
    path = Path(path)
    if path.suffix not in ['.csv', '.parquet']:
        if path.suffix != "":
            warnings.warn(
                f"Unsupported file format: {path.suffix}. "
                "Only .parquet and .csv files are supported. "
                "Defaulting to csv."
            )
        path = path.with_suffix('.csv')
    if uniquify:
        path = uniquify_fname(path)

    df = rows_to_frame(rows)
    if path.suffix == '.parquet':
        path.parent.mkdir(parents=True, exist_ok=True)
        to_parquet(df, path, metadata={'schema_version': MC_SCHEMA_VERSION})
        return path

    df['schema_version'] = MC_SCHEMA_VERSION
    text = df.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep='',
                     lineterminator='\n')
    return atomic_write_text(path, text)


def read_mc(path):
    """Read Monte Carlo rows written by ``write_mc``.

    Returns
    -------
    rows : list of McResultRow
    """
    path = Path(path)
    if path.suffix == '.parquet':
        df, metadata = read_parquet(path)
        version = metadata.get('schema_version')
    else:
        df = pd.read_csv(path, float_precision='round_trip')
        version = (df['schema_version'].iloc[0] if 'schema_version' in df
                   and not df.empty else MC_SCHEMA_VERSION)
    if version != MC_SCHEMA_VERSION:
        raise SeriesFormatError(
            f"{path}: unsupported schema_version {version}."
        )
    missing = set(MC_COLUMNS) - set(df.columns)
    if missing:
        raise SeriesFormatError(f"{path}: missing columns {sorted(missing)}.")

    rows = []
    for rec in df[MC_COLUMNS].to_dict('records'):
        seed = rec['seed']
        rec['seed'] = None if pd.isna(seed) else int(seed)
        rec['converged'] = bool(rec['converged'])
        rec['replication'] = int(rec['replication'])
        for col in ['frob_regime1', 'frob_regime2', 'c_hat', 'gamma_hat',
                    'seconds']:
            rec[col] = np.nan if pd.isna(rec[col]) else float(rec[col])
        rows.append(McResultRow(**rec))
    return rows


def write_summary(summary, path):
    "Write the summary document of ``summarize`` as JSON."
    return dump_json(summary, path)
