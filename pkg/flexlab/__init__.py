from ._version import __version__ as __version__
from .errors import *
from .hierarchy import *
from .model import *
from .numerics import *
from .rigidity import *
from .surface import *
from .tangency import *
