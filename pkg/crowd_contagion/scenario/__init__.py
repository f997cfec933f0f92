from ._types import *
from .load import *
from .seeding import *
