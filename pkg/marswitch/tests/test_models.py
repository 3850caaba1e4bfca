import pytest
import numpy as np

from marswitch.models import ModelSpec
from marswitch.models import residuals
from marswitch.models import simulate_path
from marswitch.models import CoefficientSet
from marswitch.models import eval_transition
from marswitch.models import TransitionSource
from marswitch.models import conditional_mean
from marswitch.models import attach_transition
from marswitch.models import one_step_forecast
from marswitch.models import check_stationarity
from marswitch.models import TransitionFunction
from marswitch.tensor import MatrixSeries
from marswitch.tensor import MatrixNormalSpec
from marswitch.exceptions import ModelValidityError
from marswitch.datasets.simulated import make_mar_dgp
from marswitch.datasets.simulated import make_mtar_dgp
from marswitch.datasets.simulated import make_mstar_dgp


def test_logistic_transition():
    tf = TransitionFunction.logistic(gamma=10, c=0.5)
    assert tf(0.5) == 0.5
    assert tf(-1e6) == 0.
    assert tf(1e6) == 1.
    g = tf(np.linspace(0, 1, 11))
    assert np.all(np.diff(g) > 0)
    # No overflow for a very steep logistic.
    steep = TransitionFunction.logistic(gamma=1e8, c=0.)
    assert steep(-1.) == 0.


def test_indicator_transition_ties():
    tf = TransitionFunction.indicator(0.3)
    np.testing.assert_array_equal(eval_transition(tf, [0.2, 0.3, 0.4]),
                                  [0., 1., 1.])


@pytest.mark.parametrize('kwargs, match', [
    (dict(kind='step', c=0.), "kind"),
    (dict(kind='logistic', c=0., gamma=0.), "gamma"),
    (dict(kind='logistic', c=0.), "gamma"),
    (dict(kind='indicator', c=np.inf), "finite"),
])
def test_transition_invalid(kwargs, match):
    with pytest.raises(ValueError, match=match):
        TransitionFunction(**kwargs)


def test_model_validity():
    regime = CoefficientSet(np.eye(2), np.eye(3))
    with pytest.raises(ModelValidityError, match="second regime"):
        ModelSpec('mtar', regime)
    with pytest.raises(ModelValidityError, match="logistic"):
        ModelSpec('mstar', regime, regime, TransitionFunction.indicator(0.))
    with pytest.raises(ModelValidityError, match="no second regime"):
        ModelSpec('mar', regime, regime)
    with pytest.raises(ModelValidityError, match="differ"):
        ModelSpec('mtar', regime, CoefficientSet(np.eye(3), np.eye(2)),
                  TransitionFunction.indicator(0.))
    with pytest.raises(ModelValidityError, match="Noise dimensions"):
        ModelSpec('mar', regime, noise=MatrixNormalSpec.isotropic(3, 2))
    with pytest.raises(ModelValidityError, match="kind"):
        ModelSpec('var', regime)


def test_coefficient_set_not_square():
    with pytest.raises(ValueError, match="square"):
        CoefficientSet(np.ones((2, 3)), np.eye(2))


def test_conditional_mean_matches_vector_form(rng):
    model = make_mstar_dgp(2, 3, gamma=5.)
    Y = rng.standard_normal((2, 3))
    s = 0.4
    g = model.transition(s)
    phi = model.regime1.kron() + g * model.regime2.kron()
    mean = conditional_mean(model, Y, s)
    np.testing.assert_allclose(mean.reshape(-1, order='F'),
                               phi @ Y.reshape(-1, order='F'))


def test_conditional_mean_mtar_regimes(rng):
    model = make_mtar_dgp(2, 2, c=0.5)
    Y = rng.standard_normal((2, 2))
    np.testing.assert_allclose(conditional_mean(model, Y, 0.1),
                               model.regime1.apply(Y))
    np.testing.assert_allclose(conditional_mean(model, Y, 0.5),
                               model.regime2.apply(Y))
    with pytest.raises(ValueError, match="transition value"):
        conditional_mean(model, Y)


def test_check_stationarity():
    model = make_mar_dgp(2, 2, left_scale=2., right_scale=0.4)
    stationary, radii = check_stationarity(model)
    assert stationary
    assert radii == [pytest.approx(0.8)]

    model = make_mar_dgp(2, 2, left_scale=2., right_scale=0.6)
    stationary, radii = check_stationarity(model)
    assert not stationary
    assert radii[0] == pytest.approx(1.2)


def test_simulate_rejects_nonstationary():
    model = make_mar_dgp(2, 2, left_scale=1.5, right_scale=1.)
    with pytest.raises(ModelValidityError, match="not stationary"):
        simulate_path(model, 10, seed=0)
    series = simulate_path(model, 10, seed=0, allow_nonstationary=True)
    assert series.T == 10


@pytest.mark.parametrize('make_model', [
    lambda: make_mar_dgp(2, 3),
    lambda: make_mtar_dgp(2, 3),
    lambda: make_mstar_dgp(2, 3),
    lambda: make_mstar_dgp(
        2, 3, source=TransitionSource('lagged_entry', row=1, col=2)
    ),
])
def test_simulate_is_deterministic(make_model):
    model = make_model()
    s1 = simulate_path(model, 50, seed=3)
    s2 = simulate_path(model, 50, seed=3)
    np.testing.assert_array_equal(s1.frames, s2.frames)
    assert s1.frames.shape == (50, 2, 3)
    s3 = simulate_path(model, 50, seed=4)
    assert not np.array_equal(s1.frames, s3.frames)


def test_simulate_trend_transition():
    model = make_mtar_dgp(2, 2)
    series = simulate_path(model, 40, seed=0)
    np.testing.assert_allclose(series.transition, np.arange(1, 41) / 40)
    assert series.metadata['burn_in'] == 0
    with pytest.raises(ValueError, match="burn_in"):
        simulate_path(model, 40, burn_in=10, seed=0)


def test_simulate_lagged_entry_transition():
    source = TransitionSource('lagged_entry', row=0, col=1, lag=2)
    model = make_mstar_dgp(2, 2, source=source)
    series = simulate_path(model, 30, burn_in=5, seed=1)
    np.testing.assert_array_equal(series.transition[2:],
                                  series.frames[:-2, 0, 1])
    assert series.metadata['burn_in'] == 5


def test_simulate_exogenous_transition(rng):
    model = make_mstar_dgp(2, 2, source=TransitionSource('exogenous'))
    s = rng.uniform(size=25)
    series = simulate_path(model, 20, burn_in=5, seed=0, transition=s)
    np.testing.assert_array_equal(series.transition, s[5:])
    with pytest.raises(ValueError, match="length"):
        simulate_path(model, 20, burn_in=5, seed=0, transition=s[:10])
    with pytest.raises(ValueError, match="needs the values"):
        simulate_path(model, 20, seed=0)


def test_simulate_noiseless_follows_recursion():
    model = make_mstar_dgp(2, 2, noise_scale=0.)
    y0 = np.ones((2, 2))
    series = simulate_path(model, 5, seed=0, y0=y0)
    np.testing.assert_allclose(
        series.frames[0], conditional_mean(model, y0, series.transition[0])
    )
    E = residuals(model, series)
    assert E.T == 4
    np.testing.assert_allclose(E.frames, 0, atol=1e-14)


def test_simulate_mtar_regime_noise(rng):
    model = make_mtar_dgp(2, 2, c=0.5).replace(
        noise=MatrixNormalSpec.isotropic(2, 2, 0.),
        noise_regime2=MatrixNormalSpec.isotropic(2, 2, 1.),
    )
    series = simulate_path(model, 40, seed=0)
    E = residuals(model, series).frames
    s = series.transition[1:]
    np.testing.assert_allclose(E[s < 0.5], 0, atol=1e-14)
    assert np.all(np.abs(E[s >= 0.5]).sum(axis=(1, 2)) > 0)


def test_one_step_forecast(rng):
    model = make_mtar_dgp(2, 2, c=0.5)
    frames = rng.standard_normal((4, 2, 2))
    series = MatrixSeries(frames)
    np.testing.assert_allclose(one_step_forecast(model, series, 0.9),
                               model.regime2.apply(frames[-1]))


@pytest.mark.parametrize('source, expected', [
    (TransitionSource('trend'), 11 / 10),
    (TransitionSource('lagged_entry', row=1, col=0, lag=1), 1.),
    (TransitionSource('lagged_entry', row=1, col=0, lag=3), 3.),
])
def test_next_transition_value(source, expected):
    frames = np.zeros((10, 2, 2))
    frames[:, 1, 0] = np.arange(10, 0, -1)
    assert source.next_value(MatrixSeries(frames)) == expected


def test_next_transition_value_lag_bounds():
    frames = np.zeros((3, 2, 2))
    frames[:, 0, 0] = [7., 8., 9.]
    series = MatrixSeries(frames)
    # lag == T reads the first frame.
    assert TransitionSource('lagged_entry', lag=3).next_value(series) == 7.
    with pytest.raises(ValueError, match="lag 4 is larger than the 3"):
        TransitionSource('lagged_entry', lag=4).next_value(series)


def test_attach_transition_trend():
    series = attach_transition(MatrixSeries(np.zeros((4, 2, 2))),
                               TransitionSource('trend'))
    np.testing.assert_allclose(series.transition, [.25, .5, .75, 1.])


def test_attach_transition_lagged_entry():
    frames = np.zeros((6, 2, 2))
    frames[:, 0, 1] = np.arange(6.)
    source = TransitionSource('lagged_entry', row=0, col=1, lag=2)
    series = attach_transition(MatrixSeries(frames), source)
    assert series.T == 5
    np.testing.assert_array_equal(series.frames, frames[1:])
    np.testing.assert_array_equal(series.transition, [0., 0., 1., 2., 3.])

    with pytest.raises(ValueError, match="out of"):
        attach_transition(MatrixSeries(frames),
                          TransitionSource('lagged_entry', row=2, col=0))


def test_attach_transition_exogenous():
    source = TransitionSource('exogenous')
    with pytest.raises(ValueError, match="carry"):
        attach_transition(MatrixSeries(np.zeros((3, 2, 2))), source)
    series = MatrixSeries(np.zeros((3, 2, 2)), transition=[1., 2., 3.])
    assert attach_transition(series, source) is series


@pytest.mark.slow
def test_long_path_matches_vectorized_regression():
    # The OLS standard error is about 1 / sqrt(T), so atol is 4.5 of them.
    series = simulate_path(make_mar_dgp(2, 2), 200_000, seed=0)
    V = series.vectorized()
    coef = np.linalg.lstsq(V[:-1], V[1:], rcond=None)[0]
    np.testing.assert_allclose(coef.T, 0.04 * np.eye(4), atol=0.01)
