from ._types import *
from .coupling import *
from .ghosts import *
