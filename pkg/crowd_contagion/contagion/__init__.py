from .fractions import *
from .kernel import *
