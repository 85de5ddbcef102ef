"""Compute-lane selection for the hot kernels.

Two lanes exist for every hot kernel: a numba @njit build and a plain
numpy build. The lane is picked once at import time from the
``STIEFELCAST_NUMBA`` environment variable:

    STIEFELCAST_NUMBA=1   use numba kernels (default when numba imports)
    STIEFELCAST_NUMBA=0   force the pure-numpy fallbacks

Both lanes are always importable individually (see ``kernels``), so tests
and the lane benchmark can compare them regardless of the active choice.
"""

import os
import warnings

_flag = os.environ.get("STIEFELCAST_NUMBA", "1").strip()

if _flag not in ("0", "1"):
    raise ValueError(
        f"STIEFELCAST_NUMBA must be '0' or '1', got {_flag!r}"
    )

HAVE_NUMBA = False
if _flag == "1":
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        warnings.warn(
            "numba is not importable; falling back to pure-numpy kernels",
            RuntimeWarning,
        )

USE_NUMBA = HAVE_NUMBA and _flag == "1"


def active_backend() -> str:
    """Name of the lane the package dispatches to: 'numba' or 'numpy'."""
    return "numba" if USE_NUMBA else "numpy"
