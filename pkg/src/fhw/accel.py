"""Backend selection for the hot numeric kernels.

The Mittag-Leffler evaluators exist twice: a numba @njit version and a pure
numpy version with identical panel/ladder logic.  By default the numba path
is used when numba imports cleanly; setting the environment variable
FHW_NO_NUMBA to a non-empty value (anything but "0") forces the numpy path.
The choice is made once at import time so results are reproducible within a
process.
"""

import os

NUMBA_ENV_FLAG = "FHW_NO_NUMBA"


def _numba_requested() -> bool:
    flag = os.environ.get(NUMBA_ENV_FLAG, "").strip()
    return flag in ("", "0")


USING_NUMBA = False
if _numba_requested():
    try:
        import numba  # noqa: F401

        USING_NUMBA = True
    except ImportError:
        USING_NUMBA = False


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"
