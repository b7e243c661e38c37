"""Pick the compiled kernels when they import, else the pure-Python ones.

Set ``SYMTSP_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

UNSET = _kernels_py.UNSET

_compiled = None
if not os.environ.get("SYMTSP_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

NAME = "compiled" if _compiled is not None else "python"


def fw_sweep(val, via, plen, paths, arc, bit, pair_of, paired, nclasses, width,
             path_bound, cycle_bound, record, pivots):
    # the compiled kernel packs vertex sets into 64-bit masks
    if _compiled is not None and 2 * arc.shape[0] <= 64:
        return _compiled.fw_sweep(val, via, plen, paths, arc, bit, pair_of, paired, nclasses, width,
                                  path_bound, cycle_bound, record, pivots)
    return _kernels_py.fw_sweep(val, via, plen, paths, arc, bit, pair_of, paired, nclasses, width,
                                path_bound, cycle_bound, record, pivots)


def held_karp(w):
    if _compiled is not None and w.shape[0] <= 20:
        return _compiled.held_karp(w)
    return _kernels_py.held_karp(w)
