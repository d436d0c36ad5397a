from .formats import *
from .reports import *
from .wire import *
