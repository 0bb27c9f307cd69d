"""Propagation/search kernels: compiled when available, pure Python otherwise.

Set ``KSVI_KERNELS=python`` to force the pure-Python backend.
"""

import os

from . import _pykernels

if os.environ.get("KSVI_KERNELS", "").lower() == "python":
    _backend = _pykernels
else:
    try:
        from . import _ckernels as _backend
    except ImportError:
        _backend = _pykernels

BACKEND = "compiled" if _backend is not _pykernels else "python"

propagate = _backend.propagate
search = _backend.search
count = _backend.count
crosscheck = _backend.crosscheck

SEED, R1, R2, NT = _pykernels.SEED, _pykernels.R1, _pykernels.R2, _pykernels.NT
FIXPOINT, CONTRADICTION = _pykernels.FIXPOINT, _pykernels.CONTRADICTION
TWO_ONES, THREE_ZEROS, BIVALUED = _pykernels.TWO_ONES, _pykernels.THREE_ZEROS, _pykernels.BIVALUED
