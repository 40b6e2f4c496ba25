"""Hot loops: uniform draws and break-point counting.

Each kernel exists twice, a numba ``@njit`` version and a vectorized numpy
version, and both produce bit-identical results.  The numba path is used when
numba imports and ``HIDDENMEASURE_DISABLE_NUMBA`` is unset (or ``0``).
"""

from __future__ import annotations

import os

import numpy as np

from ._rng import GOLDEN, MIX1, MIX2

_CHUNK = 1 << 20

_G = np.uint64(GOLDEN)
_M1 = np.uint64(MIX1)
_M2 = np.uint64(MIX2)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_ONE = np.uint64(1)
_TO_UNIT = 1.0 / (1 << 53)


def _numba_disabled() -> bool:
    return os.environ.get("HIDDENMEASURE_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")


# numpy path -----------------------------------------------------------------

def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def uniforms_numpy(key: int, start: int, n: int) -> np.ndarray:
    ctr = np.arange(n, dtype=np.uint64) + np.uint64(start + 1)
    z = np.uint64(key) + _G * ctr
    return (_mix64_np(z) >> _S11).astype(np.float64) * _TO_UNIT


def count_below_numpy(key: int, start: int, n: int, epsilon: float, c: float) -> int:
    """Number of draws whose break coordinate lands at or below ``c``."""
    total = 0
    for lo in range(0, n, _CHUNK):
        d = uniforms_numpy(key, start + lo, min(_CHUNK, n - lo))
        s = -epsilon + 2.0 * epsilon * d
        total += int(np.count_nonzero(s <= c))
    return total


# numba path -----------------------------------------------------------------

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _uniform_nb(key, counter):
        z = key + _G * (counter + _ONE)
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        z = z ^ (z >> _S31)
        return np.float64(z >> _S11) * _TO_UNIT

    @numba.njit(cache=True, nogil=True)
    def _uniforms_nb(key, start, n):
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            out[i] = _uniform_nb(key, start + np.uint64(i))
        return out

    @numba.njit(cache=True, nogil=True)
    def _count_below_nb(key, start, n, epsilon, c):
        total = 0
        for i in range(n):
            d = _uniform_nb(key, start + np.uint64(i))
            s = -epsilon + 2.0 * epsilon * d
            if s <= c:
                total += 1
        return total

    def uniforms_numba(key: int, start: int, n: int) -> np.ndarray:
        return _uniforms_nb(np.uint64(key), np.uint64(start), n)

    def count_below_numba(key: int, start: int, n: int, epsilon: float, c: float) -> int:
        return int(_count_below_nb(np.uint64(key), np.uint64(start), n, float(epsilon), float(c)))

else:  # pragma: no cover
    uniforms_numba = uniforms_numpy
    count_below_numba = count_below_numpy


def backend() -> str:
    return "numba" if HAVE_NUMBA and not _numba_disabled() else "numpy"


def uniforms(key: int, start: int, n: int) -> np.ndarray:
    if backend() == "numba":
        return uniforms_numba(key, start, n)
    return uniforms_numpy(key, start, n)


def count_below(key: int, start: int, n: int, epsilon: float, c: float) -> int:
    if backend() == "numba":
        return count_below_numba(key, start, n, epsilon, c)
    return count_below_numpy(key, start, n, epsilon, c)
