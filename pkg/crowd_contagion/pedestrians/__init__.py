from .particles import *
from .forces import *
from .kinematics import *
