"""Utility functions for input/output and process management in MPTV."""
from __future__ import absolute_import

from . import data_utils
from . import generic_utils
from . import image_utils

from .data_utils import *
from .generic_utils import *
from .image_utils import *

__all__ = (data_utils.__all__ +
           generic_utils.__all__ +
           image_utils.__all__)
