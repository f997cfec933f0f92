from .speed import *
from .boundary import *
from .field import *
