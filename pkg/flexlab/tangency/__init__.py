from .continuation import *
from .extension import *
from .validation import *
