import json

import click
import pytest

from marswitch.tests.utils import CaptureCmdOutput
from marswitch.results import read_mc
from marswitch.cli.main import mc


MTAR_ARGS = [
    '--set', 'model.kind=mtar', '--set', 'model.dims=[2, 2]',
    '--set', 'mc.T=60', '--set', 'mc.replications=2',
    '--set', 'estimation.thresholds=[0.3, 0.5]',
]


class TestMcCmd:

    def test_mc_csv(self, tmp_path):
        with CaptureCmdOutput() as out:
            mc([*MTAR_ARGS, '--out', str(tmp_path)], 'marswitch',
               standalone_mode=False)
        out.check_output(r"Saving result in: .*mc_results.csv", repetition=1)
        out.check_output(r"Saving result in: .*mc_summary.json",
                         repetition=1)

        rows = read_mc(tmp_path / 'mc_results.csv')
        assert [(r.replication, r.estimator) for r in rows] == [
            (0, 'mtar'), (0, 'vtar'), (1, 'mtar'), (1, 'vtar')
        ]
        assert all(r.c_hat in (0.3, 0.5) for r in rows)

        summary = json.loads((tmp_path / 'mc_summary.json').read_text())
        assert summary['n_rows'] == 4
        assert set(summary['estimators']) == {'mtar', 'vtar'}

    def test_mc_parquet_and_seed(self, tmp_path):
        args = [*MTAR_ARGS, '--set', 'mc.format=parquet', '--seed', '11',
                '--set', 'mc.estimators=[var, mar]', '-j', '2']
        with CaptureCmdOutput():
            mc([*args, '--out', str(tmp_path)], 'marswitch',
               standalone_mode=False)
        rows = read_mc(tmp_path / 'mc_results.parquet')
        assert [r.seed for r in rows] == [11, 11, 12, 12]
        assert [r.estimator for r in rows] == ['var', 'mar'] * 2

    def test_mc_is_reproducible(self, tmp_path):
        for name in ['a', 'b']:
            with CaptureCmdOutput():
                mc([*MTAR_ARGS, '--set', 'mc.estimators=[vtar]',
                    '--out', str(tmp_path / name)], 'marswitch',
                   standalone_mode=False)
        a, b = (read_mc(tmp_path / name / 'mc_results.csv')
                for name in ['a', 'b'])
        assert [r.frob_regime1 for r in a] == [r.frob_regime1 for r in b]

    def test_mc_invalid_format(self, tmp_path):
        with pytest.raises(click.BadParameter, match="mc.format"):
            mc(['--set', 'mc.format=xlsx', '--out', str(tmp_path)],
               'marswitch', standalone_mode=False)

    def test_mc_invalid_estimators(self, tmp_path):
        with CaptureCmdOutput(exit=4) as out:
            mc([*MTAR_ARGS, '--set', 'mc.estimators=[ols]',
                '--out', str(tmp_path)], 'marswitch', standalone_mode=False)
        out.check_output("Invalid mc section")
