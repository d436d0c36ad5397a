from .extension import *
from .residuals import *
