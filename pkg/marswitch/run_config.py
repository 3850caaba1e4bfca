"""YAML run configurations of the command line interface.

A run configuration is a YAML document with the sections of
``DEFAULT_RUN_CONFIG``. Every key is optional, unknown keys are rejected and
``--set section.key=value`` overrides are applied after the file is parsed.

.. code-block:: yaml

    model:
      kind: mstar
      dims: [2, 3]
    transition:
      source: trend
      gamma: 10
      c: 0.65
    simulate:
      T: 400
      seed: 7
"""
import copy
import warnings
from pathlib import Path

import yaml
import numpy as np

from .models import MODEL_KINDS
from .models import ModelSpec
from .models import CoefficientSet
from .models import TransitionSource
from .tensor import MatrixNormalSpec
from .runner import McConfig
from .estimation import IlsOptions
from .estimation import ThresholdGrid
from .estimation import SlopeThresholdGrid
from .datasets import make_mar_dgp
from .datasets import make_mtar_dgp
from .datasets import make_mstar_dgp
from .exceptions import ConfigError


DEFAULT_RUN_CONFIG = {
    'model': {
        'kind': 'mstar',
        'dims': [2, 3],
    },
    'series': {
        'path': None,
        'standardize': True,
    },
    'transition': {
        'source': 'trend',
        'row': 0,
        'col': 0,
        'lag': 1,
        'c': None,
        'gamma': None,
    },
    'coefficients': {
        'A': None,
        'B': None,
        'C': None,
        'D': None,
        'random_state': 0,
    },
    'noise': {
        'scale': 1.0,
        'sigma_r': None,
        'sigma_c': None,
    },
    'simulate': {
        'T': 400,
        'burn_in': None,
        'y0': None,
        'seed': 0,
        'allow_nonstationary': False,
    },
    'estimation': {
        'max_sweeps': 200,
        'rel_tol': 1e-8,
        'init': 'default',
        'grid_max_sweeps': None,
        'n_jobs': None,
        'seed': 0,
        'trim': None,
        'dense_grid': False,
        'thresholds': None,
        'gammas': None,
        'c_values': None,
        'inference': True,
    },
    'lmtest': {
        'K': 3,
    },
    'mc': {
        'T': 400,
        'replications': 20,
        'estimators': None,
        'base_seed': 0,
        'burn_in': None,
        'n_jobs': None,
        'format': 'csv',
    },
    'forecast': {
        'fit': None,
        's_next': None,
    },
}

# Keys that only make sense for some model kinds.
KIND_SPECIFIC_KEYS = {
    ('transition', 'c'): ('mtar', 'mstar'),
    ('transition', 'gamma'): ('mstar',),
    ('coefficients', 'C'): ('mtar', 'mstar'),
    ('coefficients', 'D'): ('mtar', 'mstar'),
    ('estimation', 'thresholds'): ('mtar',),
    ('estimation', 'dense_grid'): ('mtar',),
    ('estimation', 'gammas'): ('mstar',),
    ('estimation', 'c_values'): ('mstar',),
}

DEFAULT_C = {'mtar': 0.30, 'mstar': 0.65}
DEFAULT_GAMMA = 10.0


def _check_section(name, section, where):
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ConfigError(
            f"{where}: section '{name}' should be a mapping. "
            f"Got {section!r}."
        )
    unknown = set(section) - set(DEFAULT_RUN_CONFIG[name])
    if unknown:
        raise ConfigError(
            f"{where}: unknown keys {sorted(unknown)} in section '{name}'. "
            f"Valid keys are {list(DEFAULT_RUN_CONFIG[name])}."
        )
    return section


def _check_document(doc, where):
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: the config should be a mapping.")
    unknown = set(doc) - set(DEFAULT_RUN_CONFIG)
    if unknown:
        raise ConfigError(
            f"{where}: unknown sections {sorted(unknown)}. "
            f"Valid sections are {list(DEFAULT_RUN_CONFIG)}."
        )
    return {name: _check_section(name, section, where)
            for name, section in doc.items()}


def parse_overrides(overrides):
    """Parse ``section.key=value`` strings.

    Values are parsed with ``yaml.safe_load``, so ``K=3`` gives an int and
    ``thresholds=[0.3, 0.5]`` a list.

    Returns
    -------
    parsed : list of ((str, str), value)
    """
    parsed = []
    for item in overrides or ():
        key, sep, value = item.partition('=')
        section, dot, name = key.strip().partition('.')
        if not sep or not dot or not name:
            raise ConfigError(
                f"Invalid override '{item}'. Use the syntax "
                "section.key=value."
            )
        try:
            value = yaml.safe_load(value)
        except yaml.YAMLError as e:
            raise ConfigError(
                f"Could not parse the value of override '{item}': {e}"
            ) from e
        _check_document({section: {name: value}}, "--set")
        parsed.append(((section, name), value))
    return parsed


def load_run_config(config_file=None, overrides=(), kind=None):
    """Load a run configuration, applying the defaults and overrides.

    Parameters
    ----------
    config_file : str | Path | None
        YAML document. Only the defaults are used when None.
    overrides : iterable of str
        ``section.key=value`` overrides applied after the file, the last one
        winning. A warning lists each overridden key.
    kind : str | None
        Forces ``model.kind``, as the ``--model`` option does.

    Returns
    -------
    config : dict
        Complete configuration, with every section of
        ``DEFAULT_RUN_CONFIG``.
    """
    user = {}
    if config_file is not None:
        config_file = Path(config_file)
        try:
            with open(config_file, "r") as f:
                doc = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{config_file}: invalid YAML ({e}).") from e
        except OSError as e:
            raise ConfigError(f"Could not read {config_file}: {e}") from e
        user = _check_document(doc, config_file)
    user = copy.deepcopy(user)

    for (section, name), value in parse_overrides(overrides):
        sec = user.setdefault(section, {})
        if name in sec and sec[name] != value:
            warnings.warn(
                f"Config key {section}.{name} overridden: "
                f"{sec[name]!r} -> {value!r}."
            )
        sec[name] = value
    if kind is not None:
        user.setdefault('model', {})['kind'] = kind

    config = copy.deepcopy(DEFAULT_RUN_CONFIG)
    for section, values in user.items():
        config[section].update(values)

    kind = config['model']['kind']
    if kind not in MODEL_KINDS:
        raise ConfigError(
            f"model.kind should be in {MODEL_KINDS}. Got '{kind}'."
        )
    for (section, name), kinds in KIND_SPECIFIC_KEYS.items():
        value = user.get(section, {}).get(name)
        if value is not None and kind not in kinds:
            raise ConfigError(
                f"Key {section}.{name} does not apply to a '{kind}' model."
            )
    return config


def _matrix(value, name):
    try:
        M = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} should be a matrix of numbers.") from e
    if M.ndim != 2:
        raise ConfigError(f"{name} should be a 2D list. Got shape {M.shape}.")
    return M


def build_source(config):
    "``TransitionSource`` of the ``transition`` section."
    t = config['transition']
    try:
        return TransitionSource(t['source'], row=t['row'], col=t['col'],
                                lag=t['lag'])
    except ValueError as e:
        raise ConfigError(f"Invalid transition section: {e}") from e


def _noise(config, m, n):
    noise = config['noise']
    if noise['sigma_r'] is None and noise['sigma_c'] is None:
        return MatrixNormalSpec.isotropic(m, n, noise['scale'])
    sigma_r = (np.eye(m) if noise['sigma_r'] is None
               else _matrix(noise['sigma_r'], "noise.sigma_r"))
    sigma_c = (np.eye(n) if noise['sigma_c'] is None
               else _matrix(noise['sigma_c'], "noise.sigma_c"))
    try:
        return MatrixNormalSpec(np.zeros((m, n)), sigma_r, sigma_c)
    except ValueError as e:
        raise ConfigError(f"Invalid noise section: {e}") from e


def build_model(config):
    """``ModelSpec`` described by a run configuration.

    Missing coefficients are taken from the default data generating process
    of the kind: ``make_mar_dgp``, ``make_mtar_dgp`` or ``make_mstar_dgp``.
    """
    kind = config['model']['kind']
    try:
        m, n = (int(d) for d in config['model']['dims'])
    except (TypeError, ValueError) as e:
        raise ConfigError("model.dims should be a pair of integers.") from e
    t = config['transition']
    c = DEFAULT_C.get(kind) if t['c'] is None else t['c']
    gamma = DEFAULT_GAMMA if t['gamma'] is None else t['gamma']
    source = build_source(config)

    if kind == 'mar':
        default = make_mar_dgp(m, n)
    elif kind == 'mtar':
        default = make_mtar_dgp(
            m, n, c=c, source=source,
            random_state=config['coefficients']['random_state']
        )
    else:
        default = make_mstar_dgp(m, n, gamma=gamma, c=c, source=source)

    coefs = config['coefficients']
    try:
        regimes = [
            CoefficientSet(
                regime.left if coefs[left] is None
                else _matrix(coefs[left], f"coefficients.{left}"),
                regime.right if coefs[right] is None
                else _matrix(coefs[right], f"coefficients.{right}"),
            )
            for (left, right), regime in zip(['AB', 'CD'], default.regimes)
        ]
        return ModelSpec(
            kind, regimes[0], regimes[1] if len(regimes) > 1 else None,
            default.transition, noise=_noise(config, m, n), source=source,
        )
    except ValueError as e:
        raise ConfigError(f"Invalid model: {e}") from e


def build_ils_options(config):
    est = config['estimation']
    try:
        return IlsOptions(
            max_sweeps=est['max_sweeps'], rel_tol=est['rel_tol'],
            init=est['init'], grid_max_sweeps=est['grid_max_sweeps'],
            n_jobs=est['n_jobs'], seed=est['seed'],
        )
    except ValueError as e:
        raise ConfigError(f"Invalid estimation section: {e}") from e


def build_grids(config):
    "Return the ``(ThresholdGrid, SlopeThresholdGrid)`` of the config."
    est = config['estimation']
    values = est['thresholds']
    return (
        ThresholdGrid(trim_q=est['trim'], dense=bool(est['dense_grid']),
                      values=None if values is None else tuple(values)),
        SlopeThresholdGrid(
            gamma_values=(None if est['gammas'] is None
                          else tuple(est['gammas'])),
            c_values=(None if est['c_values'] is None
                      else tuple(est['c_values'])),
            trim_q=est['trim'],
        ),
    )


def build_mc_config(config):
    "``McConfig`` of the ``mc`` section, simulating ``build_model(config)``."
    mc = config['mc']
    threshold_grid, slope_grid = build_grids(config)
    try:
        return McConfig(
            dgp=build_model(config), T=mc['T'],
            replications=mc['replications'],
            estimators=mc['estimators'], threshold_grid=threshold_grid,
            slope_grid=slope_grid, ils=build_ils_options(config),
            base_seed=mc['base_seed'], burn_in=mc['burn_in'],
            n_jobs=mc['n_jobs'],
        )
    except ValueError as e:
        raise ConfigError(f"Invalid mc section: {e}") from e
