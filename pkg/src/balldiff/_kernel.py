"""Stencil backend selection.

The compiled extension is preferred when built; otherwise the numpy
implementation takes over transparently. Set BALLDIFF_KERNEL=python or
=compiled to force a backend (the latter fails loudly if unavailable).
"""
import os

from . import _stencil_py


def select_kernel(name: str = "auto"):
    """Return (module, backend_name) for the requested backend."""
    if name not in ("auto", "python", "compiled"):
        raise ValueError(f"unknown kernel backend {name!r}")
    if name == "python":
        return _stencil_py, "python"
    try:
        from . import _stencil
    except ImportError:
        if name == "compiled":
            raise ImportError(
                "BALLDIFF_KERNEL=compiled but the extension is not built; "
                "reinstall with a C toolchain or drop the override"
            ) from None
        return _stencil_py, "python"
    return _stencil, "compiled"


_impl, KERNEL_BACKEND = select_kernel(os.environ.get("BALLDIFF_KERNEL", "auto"))
apply_passes = _impl.apply_passes
