"""Kernel backend selection.

The package ships two implementations of the hot rational kernels: a
compiled Cython extension (``_kernels_c``) and a pure-Python fallback
(``_kernels_py``).  The compiled one is preferred when importable; the
environment variable ``CYBE_FORGE_BACKEND`` forces the choice:

    CYBE_FORGE_BACKEND=py   always use the pure-Python kernels
    CYBE_FORGE_BACKEND=c    require the compiled kernels (ImportError if absent)

Both expose the same functions with bit-identical outputs.
"""

import os

from . import _kernels_py


def _load():
    choice = os.environ.get("CYBE_FORGE_BACKEND", "").strip().lower()
    if choice in ("py", "python"):
        return _kernels_py
    try:
        from . import _kernels_c

        return _kernels_c
    except ImportError:
        if choice in ("c", "cy", "cython"):
            raise
        return _kernels_py


kernels = _load()

BACKEND_NAME = kernels.BACKEND

vec_canon = kernels.vec_canon
mat_canon = kernels.mat_canon
mat_vec = kernels.mat_vec
mat_mul = kernels.mat_mul
bilinear = kernels.bilinear
rref = kernels.rref
reduce_vec = kernels.reduce_vec
