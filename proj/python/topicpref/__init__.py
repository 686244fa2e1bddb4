"""Stance mining and user-topic preference factorization."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    ConfigError,
    DegenerateVectorError,
    DivergenceError,
    Error,
    FormatError,
    IoError,
    LookupError,
    MetricError,
    StageError,
)

__version__ = "0.1.0"
