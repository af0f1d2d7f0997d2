"""Backend selection for the batch training kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Set ``QNNSIM_BACKEND=python`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("QNNSIM_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def batch_forward(weights, angles, eps):
    return _impl.batch_forward(list(weights), angles, eps)


def batch_loss_grad(weights, angles, targets, eps):
    return _impl.batch_loss_grad(list(weights), angles, targets, eps)


def get_backend(name):
    """Return the kernel module for ``name`` ("cython" or "python")."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
