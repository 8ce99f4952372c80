"""The MPTV package: total variation deconvolution by matching pursuit over
the image gradient support."""
from __future__ import absolute_import

# import top-level submodules
from . import base
from . import bench
from . import cli
from . import grid
from . import metrics
from . import oracle
from . import prox
from . import pursuit
from . import synth
from . import utils

# import top-level attributes
from .bench import *
from .grid import *
from .metrics import *
from .oracle import *
from .prox import *
from .pursuit import *
from .synth import *

__all__ = (bench.__all__ +
           grid.__all__ +
           metrics.__all__ +
           oracle.__all__ +
           prox.__all__ +
           pursuit.__all__ +
           synth.__all__)

__version__ = '1.0.0'
