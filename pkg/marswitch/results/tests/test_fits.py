import json

import pytest
import numpy as np

from marswitch.models import simulate_path
from marswitch.baselines import estimate_var
from marswitch.baselines import estimate_vtar
from marswitch.baselines import VecModelFit
from marswitch.estimation import FitResult
from marswitch.estimation import ThresholdGrid
from marswitch.estimation import estimate_mar
from marswitch.estimation import estimate_mtar
from marswitch.estimation import coefficient_inference
from marswitch.exceptions import SeriesFormatError
from marswitch.results import read_fit
from marswitch.results import write_fit
from marswitch.results import fit_to_dict
from marswitch.datasets.simulated import make_mar_dgp
from marswitch.datasets.simulated import make_mtar_dgp


@pytest.fixture(scope='module')
def mtar_fit():
    series = simulate_path(make_mtar_dgp(2, 3), 200, seed=0)
    fit = estimate_mtar(series, ThresholdGrid(values=(0.2, 0.3, 0.4)))
    return fit, series


def test_mtar_fit_round_trip(tmp_path, mtar_fit):
    fit, _ = mtar_fit
    path = write_fit(fit, tmp_path / 'fit.json')
    read = read_fit(path)
    assert isinstance(read, FitResult)
    assert read.kind == 'mtar'
    # Exact float round-trip.
    assert read.ssq == fit.ssq
    assert read.c_hat == fit.c_hat
    for got, expected in zip(read.model.regimes, fit.model.regimes):
        np.testing.assert_array_equal(got.left, expected.left)
        np.testing.assert_array_equal(got.right, expected.right)
    assert read.n_params == fit.n_params
    assert read.converged == fit.converged
    assert read.transition_source.kind == 'trend'
    assert [tuple(p) for p in read.grid_profile] == [
        tuple(p) for p in fit.grid_profile
    ]
    assert read.pvalues is None


def test_missing_pvalues_are_null(tmp_path, mtar_fit):
    fit, _ = mtar_fit
    doc = json.loads(write_fit(fit, tmp_path / 'fit.json').read_text())
    assert doc['pvalues'] is None
    assert doc['schema_version'] == 1
    assert set(doc['coefficients']) == {'A', 'B', 'C', 'D'}


def test_fit_with_pvalues(tmp_path, mtar_fit):
    fit, series = mtar_fit
    pvalues = coefficient_inference(fit, series)
    pvalues['A'][0, 1] = np.nan
    path = write_fit(fit, tmp_path / 'fit.json', pvalues=pvalues)
    doc = json.loads(path.read_text())
    assert doc['pvalues']['A'][0][1] is None

    read = read_fit(path)
    assert set(read.pvalues) == {'A', 'B', 'C', 'D'}
    np.testing.assert_array_equal(read.pvalues['B'], pvalues['B'])
    assert np.isnan(read.pvalues['A'][0, 1])


def test_write_fit_is_deterministic(tmp_path, mtar_fit):
    fit, _ = mtar_fit
    a = write_fit(fit, tmp_path / 'a.json').read_bytes()
    b = write_fit(fit, tmp_path / 'b.json').read_bytes()
    assert a == b
    assert a.endswith(b"}\n")


def test_mar_fit_has_no_transition(tmp_path):
    series = simulate_path(make_mar_dgp(2, 2), 100, seed=0)
    fit = estimate_mar(series)
    doc = fit_to_dict(fit)
    assert doc['transition'] is None
    assert set(doc['coefficients']) == {'A', 'B'}
    read = read_fit(write_fit(fit, tmp_path / 'fit.json'))
    assert read.model.regime2 is None
    assert read.ssq == fit.ssq


@pytest.mark.parametrize('estimate', [
    estimate_var,
    lambda s: estimate_vtar(s, ThresholdGrid(values=(0.3, 0.5))),
])
def test_vector_fit_round_trip(tmp_path, estimate):
    series = simulate_path(make_mtar_dgp(2, 2), 150, seed=0)
    fit = estimate(series)
    read = read_fit(write_fit(fit, tmp_path / 'fit.json'))
    assert isinstance(read, VecModelFit)
    assert read.kind == fit.kind
    assert read.ssq == fit.ssq
    assert read.n_params == fit.n_params
    np.testing.assert_array_equal(read.phi0, fit.phi0)
    if fit.phi1 is None:
        assert read.phi1 is None and read.tf is None
    else:
        np.testing.assert_array_equal(read.phi1, fit.phi1)
        assert read.tf.c == fit.tf.c


def test_read_fit_rejects_bad_documents(tmp_path, mtar_fit):
    path = tmp_path / 'fit.json'
    path.write_text("{not json")
    with pytest.raises(SeriesFormatError, match="invalid JSON"):
        read_fit(path)

    write_fit(mtar_fit[0], path)
    doc = json.loads(path.read_text())
    doc['schema_version'] = 2
    path.write_text(json.dumps(doc))
    with pytest.raises(SeriesFormatError, match="schema_version 2"):
        read_fit(path)

    doc['schema_version'] = 1
    doc['coefficients']['B'] = "oops"
    path.write_text(json.dumps(doc))
    with pytest.raises(SeriesFormatError, match="invalid coefficient B"):
        read_fit(path)
