"""Kernel backend selection.

The compiled ``_kernels`` extension is used when importable; otherwise the
numpy ``_pykernels``.  ``BOOTWALK_BACKEND=python`` forces the fallback and
``BOOTWALK_BACKEND=cython`` makes a missing extension an error.
"""
import os

_choice = os.environ.get("BOOTWALK_BACKEND", "").strip().lower()

if _choice == "python":
    from . import _pykernels as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        if _choice == "cython":
            raise
        from . import _pykernels as kernels

NAME = "cython" if kernels.__name__.endswith("._kernels") else "python"


def load(name: str):
    """Return a specific backend module (``"cython"`` or ``"python"``)."""
    if name == "cython":
        from . import _kernels
        return _kernels
    if name == "python":
        from . import _pykernels
        return _pykernels
    raise ValueError(f"unknown backend {name!r}")
