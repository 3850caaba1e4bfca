import json

import click
import pytest
import numpy as np

from marswitch.tests.utils import CaptureCmdOutput
from marswitch.models import simulate_path
from marswitch.results import read_fit
from marswitch.results import write_series
from marswitch.cli.main import estimate
from marswitch.datasets.simulated import make_mar_dgp
from marswitch.datasets.simulated import make_mtar_dgp
from marswitch.datasets.simulated import make_mstar_dgp


@pytest.fixture
def series_file(tmp_path):
    def write(dgp, T=200):
        series = simulate_path(dgp, T, seed=0)
        return str(write_series(series, tmp_path / 'series.csv'))
    return write


def _estimate(*args, exit=None):
    with CaptureCmdOutput(exit=exit) as out:
        estimate(list(args), 'marswitch', standalone_mode=False)
    return out


class TestEstimateCmd:

    def test_estimate_mar(self, tmp_path, series_file):
        path = series_file(make_mar_dgp(2, 3, 0.5, 0.5))
        out = _estimate(path, '--model', 'mar', '--out', str(tmp_path))
        out.check_output(r"Saving result in: .*fit.json", repetition=1)
        out.check_output(r"Model: MAR \(2, 3\)")

        fit = read_fit(tmp_path / 'fit.json')
        assert fit.kind == 'mar'
        assert fit.model.dims == (2, 3)
        assert fit.n_params == 4 + 9 - 1
        assert fit.diagnostics['standardized'] is True
        assert set(fit.pvalues) == {'A', 'B'}
        assert "p-values(A)" in (tmp_path / 'report.txt').read_text()

    def test_estimate_mtar(self, tmp_path, series_file):
        path = series_file(make_mtar_dgp(2, 2))
        _estimate(path, '--model', 'mtar', '--out', str(tmp_path),
                  '--set', 'estimation.thresholds=[0.3, 0.5]',
                  '--no-standardize')
        doc = json.loads((tmp_path / 'fit.json').read_text())
        assert doc['kind'] == 'mtar'
        assert doc['transition']['c'] in (0.3, 0.5)
        assert [p[0] for p in doc['grid_profile']] == [0.3, 0.5]
        assert doc['transition_source'] == {'kind': 'trend'}
        assert doc['diagnostics']['standardized'] is False
        assert set(doc['pvalues']) == {'A', 'B', 'C', 'D'}

    def test_estimate_mstar_without_inference(self, tmp_path, series_file):
        path = series_file(make_mstar_dgp(2, 2), T=150)
        _estimate(path, '--model', 'mstar', '--out', str(tmp_path),
                  '--set', 'estimation.gammas=[10]',
                  '--set', 'estimation.c_values=[0.65]',
                  '--set', 'estimation.inference=false')
        doc = json.loads((tmp_path / 'fit.json').read_text())
        assert doc['kind'] == 'mstar'
        assert doc['transition']['gamma'] > 0
        assert doc['pvalues'] is None
        assert doc['n_params'] == 2 * (4 + 4 - 1) + 2

    def test_estimate_is_deterministic(self, tmp_path, series_file):
        path = series_file(make_mtar_dgp(2, 2))
        args = [path, '--model', 'mtar',
                '--set', 'estimation.thresholds=[0.3, 0.4, 0.5]']
        _estimate(*args, '--out', str(tmp_path / 'a'))
        _estimate(*args, '--out', str(tmp_path / 'b'))
        assert ((tmp_path / 'a' / 'fit.json').read_bytes()
                == (tmp_path / 'b' / 'fit.json').read_bytes())

    def test_series_from_config(self, tmp_path, series_file):
        path = series_file(make_mar_dgp(2, 2))
        config = tmp_path / 'run.yml'
        config.write_text(f"model:\n  kind: mar\nseries:\n  path: {path}\n")
        _estimate('--config', str(config), '--out', str(tmp_path / 'out'))
        assert read_fit(tmp_path / 'out' / 'fit.json').kind == 'mar'

    def test_no_series(self, tmp_path):
        with pytest.raises(click.BadParameter, match="No series given"):
            estimate(['--model', 'mar', '--out', str(tmp_path)],
                     'marswitch', standalone_mode=False)

    def test_mar_with_threshold_keys(self, tmp_path, series_file):
        path = series_file(make_mar_dgp(2, 2))
        config = tmp_path / 'run.yml'
        config.write_text("transition:\n  c: 0.3\n")
        out = _estimate(path, '--model', 'mar', '--config', str(config),
                        '--out', str(tmp_path), exit=4)
        out.check_output("Key transition.c does not apply to a 'mar' model")
        assert not (tmp_path / 'fit.json').exists()

    def test_malformed_series(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text("t,row,col,value\n1,x,a,1\n1,y,a,2\n2,x,a,3\n")
        out = _estimate(str(path), '--model', 'mar', '--out', str(tmp_path),
                        exit=4)
        out.check_output(r"missing cell \(t=2, y, a\)")

    def test_no_admissible_threshold(self, tmp_path, series_file):
        path = series_file(make_mtar_dgp(2, 2), T=60)
        out = _estimate(path, '--model', 'mtar', '--out', str(tmp_path),
                        '--set', 'estimation.thresholds=[10.0]', exit=3)
        out.check_output("No admissible threshold")
        doc = json.loads((tmp_path / 'fit_error.json').read_text())
        assert doc['status'] == 'error'
        assert doc['grid_profile'] == [[10.0, None]]
        assert not (tmp_path / 'fit.json').exists()

    def test_seed_option(self, tmp_path, series_file):
        path = series_file(make_mar_dgp(2, 2))
        _estimate(path, '--model', 'mar', '--seed', '5',
                  '--set', 'estimation.init=uniform', '--out', str(tmp_path))
        fit = read_fit(tmp_path / 'fit.json')
        assert np.all(np.isfinite(fit.model.regime1.left))
