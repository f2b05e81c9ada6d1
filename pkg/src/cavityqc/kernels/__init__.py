"""State-vector kernels with a compiled core and a numpy fallback.

The compiled extension is used when it was built; setting the environment
variable ``CAVITYQC_PURE_PYTHON=1`` before import forces the fallback.
"""

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_FORCE_PY = os.environ.get("CAVITYQC_PURE_PYTHON", "0") == "1"


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _ckernels is not None else [])


def get_backend(name: str | None = None) -> ModuleType:
    """Kernel module by name (``"compiled"`` or ``"python"``); default is the active one."""
    if name is None:
        return _ckernels if (_ckernels is not None and not _FORCE_PY) else _pykernels
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


_active = get_backend()
BACKEND = "compiled" if _active is _ckernels else "python"

apply_1q = _active.apply_1q
apply_3q = _active.apply_3q
prob_one = _active.prob_one
project = _active.project

__all__ = ["BACKEND", "apply_1q", "apply_3q", "available_backends", "get_backend", "prob_one", "project"]
