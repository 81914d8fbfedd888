"""Pick the kernel implementation at import time.

The compiled module is used when it was built; set ``HGBENCH_PURE_PYTHON=1``
to force the fallback.
"""
import os

from hgbench import _pykernels

if os.environ.get("HGBENCH_PURE_PYTHON"):
    kernels = _pykernels
else:
    try:
        from hgbench import _ckernels as kernels
    except ImportError:
        kernels = _pykernels

BACKEND = "cython" if kernels is not _pykernels else "python"


def available():
    """All importable kernel modules, keyed by name."""
    found = {"python": _pykernels}
    try:
        from hgbench import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
