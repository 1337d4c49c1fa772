"""Pick the compiled update kernel when it is importable.

Set ``TRIAXDAMAGE_PURE_PYTHON=1`` to force the pure-Python kernel.
"""

import os

from . import _kernel_py

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

if _ckernel is not None and os.environ.get("TRIAXDAMAGE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    kernel = _ckernel
    NAME = "cython"
else:
    kernel = _kernel_py
    NAME = "python"

KERNELS = {"python": _kernel_py}
if _ckernel is not None:
    KERNELS["cython"] = _ckernel


def use(name):
    """Switch the active kernel (``"python"`` or ``"cython"``); returns the previous name."""
    global kernel, NAME
    if name not in KERNELS:
        raise ValueError(f"kernel {name!r} not available; have {sorted(KERNELS)}")
    prev = NAME
    kernel = KERNELS[name]
    NAME = name
    return prev
