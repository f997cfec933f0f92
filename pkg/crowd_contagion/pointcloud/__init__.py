from .neighbors import *
from .stencil import *
from .volumes import *
