import json

import pytest
import numpy as np
import pandas as pd

from marswitch.runner import McResultRow
from marswitch.runner import summarize
from marswitch.exceptions import SeriesFormatError
from marswitch.results import read_mc
from marswitch.results import write_mc
from marswitch.results import write_summary
from marswitch.results.mc import MC_COLUMNS


ROWS = [
    McResultRow(0, 'mtar', frob_regime1=0.1, frob_regime2=1 / 3,
                c_hat=0.3, seconds=0.25, converged=True, status='done',
                seed=12),
    McResultRow(0, 'vtar', frob_regime1=2.5e-17, c_hat=0.31,
                converged=True, status='done', seed=12),
    McResultRow(1, 'mtar', status='error', seed=13),
]


def _same_rows(got, expected):
    assert len(got) == len(expected)
    for a, b in zip(got, expected):
        for key, value in b.to_dict().items():
            if isinstance(value, float) and np.isnan(value):
                assert np.isnan(getattr(a, key)), key
            else:
                assert getattr(a, key) == value, key


@pytest.mark.parametrize('suffix', ['.csv', '.parquet'])
def test_mc_round_trip(tmp_path, suffix):
    path = write_mc(ROWS, tmp_path / f'mc{suffix}')
    assert path.suffix == suffix
    _same_rows(read_mc(path), ROWS)


def test_mc_csv_layout(tmp_path):
    path = write_mc(ROWS, tmp_path / 'mc.csv')
    lines = path.read_text().split("\n")
    assert lines[0] == ",".join(MC_COLUMNS + ['schema_version'])
    # Missing values are empty fields, not zeros.
    assert lines[3].startswith("1,mtar,,,,,,False,error,13,")
    assert lines[-1] == ""


def test_empty_mc_is_header_only(tmp_path):
    path = write_mc([], tmp_path / 'mc.csv')
    assert path.read_text() == ",".join(MC_COLUMNS + ['schema_version']) \
        + "\n"
    assert read_mc(path) == []


def test_write_mc_unsupported_suffix(tmp_path):
    with pytest.warns(UserWarning, match="Unsupported file format"):
        path = write_mc(ROWS, tmp_path / 'mc.txt')
    assert path.suffix == '.csv'
    assert path.exists()


def test_write_mc_uniquify(tmp_path):
    first = write_mc(ROWS, tmp_path / 'mc.csv', uniquify=True)
    second = write_mc(ROWS, tmp_path / 'mc.csv', uniquify=True)
    assert first.name == 'mc.csv'
    assert second.name == 'mc_1.csv'


def test_read_mc_checks_schema(tmp_path):
    path = tmp_path / 'mc.csv'
    df = pd.DataFrame([r.to_dict() for r in ROWS], columns=MC_COLUMNS)
    df['schema_version'] = 2
    df.to_csv(path, index=False)
    with pytest.raises(SeriesFormatError, match="schema_version 2"):
        read_mc(path)

    df.drop(columns=['seed', 'schema_version']).to_csv(path, index=False)
    with pytest.raises(SeriesFormatError, match=r"missing columns \['seed'\]"):
        read_mc(path)


def test_write_summary(tmp_path):
    summary = summarize(ROWS, c_true=0.3)
    path = write_summary(summary, tmp_path / 'summary.json')
    doc = json.loads(path.read_text())
    assert doc['schema_version'] == 1
    assert doc['estimators']['vtar']['frob_regime2'] is None
    assert doc['estimators']['mtar']['convergence_rate'] == 0.5
