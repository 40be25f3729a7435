"""Hot kernels, compiled when available.

The Cython build (``kernels_fast``) is preferred; the pure-Python twin
(``kernels_slow``) is used when the extension was not built or when
``PFGROUPS_PURE=1`` is set in the environment.
"""
import os

if os.environ.get("PFGROUPS_PURE", "") not in ("", "0"):
    from pfgroups._ext import kernels_slow as kernels
    BACKEND = "python"
else:
    try:
        from pfgroups._ext import kernels_fast as kernels
        BACKEND = "cython"
    except ImportError:
        from pfgroups._ext import kernels_slow as kernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
