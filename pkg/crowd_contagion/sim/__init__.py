from .state import *
from .simulator import *
