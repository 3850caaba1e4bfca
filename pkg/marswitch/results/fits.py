"""JSON documents describing fitted models."""
import json
import math
from pathlib import Path

import numpy as np

from ..models import ModelSpec
from ..models import CoefficientSet
from ..models import TransitionSource
from ..models import TransitionFunction
from ..tensor import MatrixNormalSpec
from ..baselines import VecModelFit
from ..estimation import FitResult
from ..exceptions import SeriesFormatError
from .files_utils import atomic_write_text

FIT_SCHEMA_VERSION = 1


def to_jsonable(obj):
    """Recursively convert ``obj`` to JSON types, NaN and inf becoming None.

    Floats are kept as Python floats so that ``json`` writes their shortest
    round-trip representation.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dump_json(doc, path):
    "Write a JSON document atomically, with a final newline."
    text = json.dumps(to_jsonable(doc), indent=2, allow_nan=False)
    return atomic_write_text(path, text + "\n")


def _transition_doc(tf):
    if tf is None:
        return None
    return {'kind': tf.kind, 'c': tf.c, 'gamma': tf.gamma}


def fit_to_dict(fit, pvalues=None):
    """JSON document of a structured or vectorized fit.

    Parameters
    ----------
    fit : FitResult | VecModelFit
        The fit to describe.
    pvalues : dict | None
        P-values of the coefficients, defaults to ``fit.pvalues``. Missing
        p-values are written as null.
    """
    if isinstance(fit, VecModelFit):
        return {
            'schema_version': FIT_SCHEMA_VERSION,
            'kind': fit.kind,
            'dims': list(fit.phi0.shape),
            'coefficients': {'phi0': fit.phi0, 'phi1': fit.phi1},
            'transition': _transition_doc(fit.tf),
            'ssq': fit.ssq,
            'n_obs': fit.n_obs,
            'n_params': fit.n_params,
            'grid_profile': fit.grid_profile,
            'diagnostics': fit.diagnostics,
        }

    model = fit.model
    coefs = {}
    for name, regime in zip(('AB', 'CD'), model.regimes):
        coefs[name[0]], coefs[name[1]] = regime.left, regime.right
    pvalues = fit.pvalues if pvalues is None else pvalues
    source = fit.transition_source or model.source
    return {
        'schema_version': FIT_SCHEMA_VERSION,
        'kind': model.kind,
        'dims': list(model.dims),
        'coefficients': coefs,
        'transition': _transition_doc(model.transition),
        'transition_source': source.to_dict(),
        'noise_variance': float(model.noise.sigma_r[0, 0]
                                * model.noise.sigma_c[0, 0]),
        'ssq': fit.ssq,
        'sweeps_used': fit.sweeps_used,
        'converged': fit.converged,
        'status': fit.status,
        'n_obs': fit.n_obs,
        'n_params': fit.n_params,
        'grid_profile': fit.grid_profile,
        'pvalues': None if pvalues is None else {
            name: pvalues.get(name) for name in coefs
        },
        'diagnostics': fit.diagnostics,
    }


def write_fit(fit, path, pvalues=None):
    """Write a fit as a JSON document.

    Returns
    -------
    path : Path
        Path of the written file.
    """
    return dump_json(fit_to_dict(fit, pvalues), path)


def _matrix(doc, name, path):
    try:
        return np.array(doc['coefficients'][name], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise SeriesFormatError(
            f"{path}: invalid coefficient {name} ({e})."
        ) from e


def _pvalues(doc):
    if doc.get('pvalues') is None:
        return None
    return {
        name: None if value is None else np.array(
            [[np.nan if v is None else v for v in row] for row in value]
        )
        for name, value in doc['pvalues'].items()
    }


def read_fit(path):
    """Read a fit written by ``write_fit``.

    Returns
    -------
    fit : FitResult | VecModelFit
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise SeriesFormatError(f"{path}: invalid JSON ({e}).") from e
    if doc.get('schema_version') != FIT_SCHEMA_VERSION:
        raise SeriesFormatError(
            f"{path}: unsupported schema_version "
            f"{doc.get('schema_version')}."
        )

    tf = None
    if doc.get('transition') is not None:
        t = doc['transition']
        tf = TransitionFunction(t['kind'], t['c'], t.get('gamma'))

    kind = doc['kind']
    if kind in ('var', 'vtar', 'vlstar'):
        phi1 = doc['coefficients'].get('phi1')
        return VecModelFit(
            kind, _matrix(doc, 'phi0', path), doc['ssq'],
            phi1=None if phi1 is None else _matrix(doc, 'phi1', path),
            tf=tf, grid_profile=doc.get('grid_profile'),
            n_obs=doc.get('n_obs'), diagnostics=doc.get('diagnostics', {}),
        )

    regime1 = CoefficientSet(_matrix(doc, 'A', path), _matrix(doc, 'B', path))
    regime2 = None
    if 'C' in doc['coefficients']:
        regime2 = CoefficientSet(_matrix(doc, 'C', path),
                                 _matrix(doc, 'D', path))
    m, n = regime1.dims
    source = TransitionSource(**doc.get('transition_source',
                                        {'kind': 'trend'}))
    noise_variance = doc.get('noise_variance') or 0.0
    model = ModelSpec(
        kind, regime1, regime2, tf,
        noise=MatrixNormalSpec.isotropic(m, n, noise_variance),
        source=source,
    )
    return FitResult(
        model=model, ssq=doc['ssq'], sweeps_used=doc.get('sweeps_used', 0),
        converged=doc.get('converged', False),
        status=doc.get('status', 'done'),
        grid_profile=doc.get('grid_profile'), pvalues=_pvalues(doc),
        n_obs=doc.get('n_obs'), diagnostics=doc.get('diagnostics', {}),
        transition_source=source,
    )
