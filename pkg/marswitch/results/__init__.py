from .series import read_series
from .series import write_series
from .series import series_to_frame
from .fits import read_fit
from .fits import write_fit
from .fits import fit_to_dict
from .mc import read_mc
from .mc import write_mc
from .mc import write_summary
from .parquet import to_parquet
from .parquet import read_parquet
from .parquet import get_metadata
from .files_utils import uniquify_fname
from .files_utils import atomic_write_text

__all__ = [
    'read_series', 'write_series', 'series_to_frame',
    'read_fit', 'write_fit', 'fit_to_dict',
    'read_mc', 'write_mc', 'write_summary',
    'to_parquet', 'read_parquet', 'get_metadata',
    'uniquify_fname', 'atomic_write_text',
]
