import json

import click
import pytest
import numpy as np

from marswitch.tests.utils import CaptureCmdOutput
from marswitch.models import simulate_path
from marswitch.tensor import MatrixSeries
from marswitch.results import write_series
from marswitch.cli.main import lmtest
from marswitch.datasets.simulated import make_mstar_dgp


class TestLmtestCmd:

    def test_lmtest(self, tmp_path):
        series = simulate_path(make_mstar_dgp(2, 2), 300, seed=0)
        path = write_series(series, tmp_path / 'series.csv')
        with CaptureCmdOutput() as out:
            lmtest([str(path), '-K', '2', '--out', str(tmp_path)],
                   'marswitch', standalone_mode=False)
        out.check_output(r"LM score: statistic = .*, dof = 32", repetition=1)
        out.check_output(r"LM tr2: statistic = .*, dof = 32", repetition=1)
        out.check_output(r"Rank diagnostics: rank 12 / 12 regressors")

        doc = json.loads((tmp_path / 'lmtest.json').read_text())
        assert doc['K'] == 2
        for form in ['score', 'tr2']:
            assert doc[form]['form'] == form
            assert doc[form]['dof'] == 32
            assert 0 <= doc[form]['p_value'] <= 1
        assert doc['score']['statistic'] == pytest.approx(
            doc['tr2']['statistic'], rel=1e-8
        )
        assert doc['diagnostics']['n_obs'] == 299

    def test_lmtest_order_from_config(self, tmp_path):
        series = simulate_path(make_mstar_dgp(2, 2), 200, seed=0)
        path = write_series(series, tmp_path / 'series.csv')
        with CaptureCmdOutput():
            lmtest([str(path), '--set', 'lmtest.K=1', '--out',
                    str(tmp_path)], 'marswitch', standalone_mode=False)
        doc = json.loads((tmp_path / 'lmtest.json').read_text())
        assert doc['K'] == 1 and doc['score']['dof'] == 16

    def test_lmtest_invalid_order(self, tmp_path):
        series = MatrixSeries(np.random.default_rng(0).standard_normal(
            (50, 2, 2)
        ))
        path = write_series(series, tmp_path / 'series.csv')
        with pytest.raises(click.BadParameter, match="K should be"):
            lmtest([str(path), '-K', '0'], 'marswitch',
                   standalone_mode=False)

    def test_lmtest_rank_failure(self, tmp_path):
        # An exogenous constant transition makes Z_K collinear with X.
        series = MatrixSeries(
            np.random.default_rng(0).standard_normal((50, 2, 2)),
            transition=np.ones(50),
        )
        path = write_series(series, tmp_path / 'series.csv')
        with CaptureCmdOutput(exit=3) as out:
            lmtest([str(path), '--set', 'transition.source=exogenous',
                    '--out', str(tmp_path)], 'marswitch',
                   standalone_mode=False)
        out.check_output("Z_K")
        assert not (tmp_path / 'lmtest.json').exists()
