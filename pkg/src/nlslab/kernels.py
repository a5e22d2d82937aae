"""Backend selection for the single-mode kernels.

The compiled extension is used when it imports; otherwise the NumPy
fallback. Set ``NLSLAB_PURE_PYTHON=1`` to force the fallback at import time,
or call :func:`use_backend` at runtime (tests and benchmarks do this).
"""
import os

from nlslab import _pykernels

try:
    from nlslab import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

if os.environ.get("NLSLAB_PURE_PYTHON", "0") == "1" or _ckernels is None:
    _active = "python"
else:
    _active = "cython"


def available_backends():
    return sorted(_BACKENDS)


def backend():
    """Name of the active backend."""
    return _active


def use_backend(name):
    """Switch the active backend; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    previous, _active = _active, name
    return previous


def apply_mode(x, op, left, right):
    return _BACKENDS[_active].apply_mode(x, op, left, right)


def sandwich(rho, ops, left, right):
    return _BACKENDS[_active].sandwich(rho, ops, left, right)
