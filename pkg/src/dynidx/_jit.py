"""JIT switch.

Kernels are plain Python functions over numpy arrays.  When numba is
importable and ``DYNIDX_DISABLE_NUMBA`` is unset (or ``0``), they are
compiled with ``numba.njit``; otherwise the same code runs interpreted on
numpy scalars, which is slow but exercises identical logic.
"""
import os

import numpy as np

_flag = os.environ.get("DYNIDX_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    import numba

    USE_NUMBA = True
except ImportError:
    numba = None
    USE_NUMBA = False


def njit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)

if USE_NUMBA:

    @njit
    def popcount(x):
        x = x - ((x >> np.uint64(1)) & _M1)
        x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
        x = (x + (x >> np.uint64(4))) & _M4
        return np.int64((x * _H01) >> np.uint64(56))

    @njit
    def lowest_bit(x):
        # index of the least significant set bit; x != 0
        return popcount((x & (~x + np.uint64(1))) - np.uint64(1))

else:

    def popcount(x):
        return int(x).bit_count()

    def lowest_bit(x):
        x = int(x)
        return (x & -x).bit_length() - 1


__all__ = ["USE_NUMBA", "njit", "popcount", "lowest_bit"]
