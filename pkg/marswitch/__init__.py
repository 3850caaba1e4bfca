from .tensor import MatrixSeries
from .tensor import MatrixNormalSpec

from .models import ModelSpec
from .models import CoefficientSet
from .models import TransitionSource
from .models import TransitionFunction
from .models import simulate_path
from .models import check_stationarity
from .models import one_step_forecast

from .estimation import IlsOptions
from .estimation import ThresholdGrid
from .estimation import SlopeThresholdGrid
from .estimation import estimate_mar
from .estimation import estimate_mtar
from .estimation import estimate_mstar

from .baselines import estimate_var
from .baselines import estimate_vtar
from .baselines import estimate_vlstar

from .linearity import lm_test_score
from .linearity import lm_test_tr2

from .runner import McConfig
from .runner import summarize
from .runner import run_monte_carlo

__version__ = "0.1.0dev0"

__all__ = [
    'MatrixSeries', 'MatrixNormalSpec', 'ModelSpec', 'CoefficientSet',
    'TransitionSource', 'TransitionFunction', 'simulate_path',
    'check_stationarity', 'one_step_forecast', 'IlsOptions', 'ThresholdGrid',
    'SlopeThresholdGrid', 'estimate_mar', 'estimate_mtar', 'estimate_mstar',
    'estimate_var', 'estimate_vtar', 'estimate_vlstar', 'lm_test_score',
    'lm_test_tr2', 'McConfig', 'summarize', 'run_monte_carlo', '__version__',
]
