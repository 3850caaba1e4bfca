from .base import IlsOptions
from .base import FitResult
from .base import normalize_coefficients
from .base import normalize_identification
from .grids import ThresholdGrid
from .grids import SlopeThresholdGrid
from .ils import estimate_mar
from .ils import estimate_mtar
from .ils import estimate_mstar
from .ils import mstar_loss
from .gradients import mtar_loss
from .gradients import mtar_gradients
from .gradients import mstar_gradients
from .inference import coefficient_inference


__all__ = [
    'IlsOptions',
    'FitResult',
    'ThresholdGrid',
    'SlopeThresholdGrid',
    'estimate_mar',
    'estimate_mtar',
    'estimate_mstar',
    'mstar_loss',
    'mtar_loss',
    'mtar_gradients',
    'mstar_gradients',
    'coefficient_inference',
    'normalize_coefficients',
    'normalize_identification',
]
