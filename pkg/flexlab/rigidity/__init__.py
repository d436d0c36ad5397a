from .motions import *
from .operator import *
from .spaces import *
