from .exact import *
from .linalg import *
from .policy import *
