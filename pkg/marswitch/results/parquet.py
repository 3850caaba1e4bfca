import json

import pyarrow as pa
import pyarrow.parquet as pq

JSON_KEY = b"_meta_json"


def to_parquet(df, path, metadata=None):
    """Write a ``pandas.DataFrame`` in a parquet file, with optional metadata.

    Parameters
    ----------
    df: pd.DataFrame
        DataFrame with primitive columns to write in the parquet file.
    path: str | Path
        Path to write the parquet file.
    metadata: dict or None
        Metadata to store in the parquet file. This metadata should be
        serializable with json.
    """
    table = pa.Table.from_pandas(df, preserve_index=False)
    new_metadata = {
        JSON_KEY: json.dumps(metadata or {}).encode("utf-8"),
        **(table.schema.metadata or {})
    }
    table = table.replace_schema_metadata(new_metadata)
    pq.write_table(table, path)


def read_parquet(path):
    """Read a parquet file written by ``to_parquet``.

    Returns
    -------
    df: pd.DataFrame
        Content of the file.
    metadata: dict
        Metadata embedded in the file.
    """
    table = pq.read_table(path)
    meta = table.schema.metadata or {}
    metadata = json.loads(meta.get(JSON_KEY, b"{}").decode("utf-8"))
    return table.to_pandas(), metadata


def get_metadata(path):
    """Retrieve metadata embedded using the ``to_parquet`` function.

    Parameters
    ----------
    path: str | Path
        Path of the parquet file to read from.
    """
    meta = pq.read_metadata(path)
    if meta.metadata is None or JSON_KEY not in meta.metadata:
        # No metadata was saved in the file, skipping.
        return {}

    return json.loads(meta.metadata[JSON_KEY].decode("utf-8"))
