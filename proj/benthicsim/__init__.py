from ._benthic import *  # noqa: F401,F403
from ._benthic import __doc__  # noqa: F401
