from .configuration import *
from .curve import *
from .deformation import *
from .framework import *
from .grid import *
from .scalar import *
