"""Citation sentiment pipeline (C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import (
    DimensionMismatch,
    Error,
    ParseError,
    TrainingDiverged,
)

__version__ = "0.1.0"
