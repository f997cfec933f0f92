from .frames import *
from .compare import *
from .plot import *
