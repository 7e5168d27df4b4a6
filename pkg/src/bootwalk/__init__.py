"""Bootstrap random walks over prime-order cyclic groups."""

__version__ = "0.1.0"

from ._backend import NAME as backend
from .cyclic_group import GroupSpec, make_group, simple_group

__all__ = ["GroupSpec", "backend", "make_group", "simple_group", "__version__"]
