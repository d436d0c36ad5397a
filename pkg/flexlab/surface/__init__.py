from .discretization import *
from .forms import *
from .residuals import *
