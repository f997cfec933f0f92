__version__ = '0.1.0'

from .errors import *
from .log import *
from ._numba import NUMBA_AVAILABLE
from .scenario import *  # scenario has __all__ in each file
from .pointcloud import *
from .eikonal import *
from .pedestrians import *
from .contagion import *
from .obstacle import *
from .sim import Simulator, SimState, Diagnostics, run
from .io_ops import *
from .cli import cli_main

if not NUMBA_AVAILABLE:
    from warnings import warn
    warn('numba is not installed: the eikonal solver will run in pure Python (slow).')
