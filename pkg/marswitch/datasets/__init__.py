from .simulated import make_mar_dgp
from .simulated import make_mtar_dgp
from .simulated import make_mstar_dgp

__all__ = ['make_mar_dgp', 'make_mtar_dgp', 'make_mstar_dgp']
