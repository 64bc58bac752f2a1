"""Backend selection for the hot loops.

Two interchangeable implementations exist: a numba-jitted one and a
pure-numpy one.  The jitted backend is used when numba imports cleanly;
setting the environment variable ``RECONSUME_NO_NUMBA`` to a truthy
value (anything but ``0``/``false``/``no``/empty) forces the numpy
backend.  Selection happens once at import time.
"""

from __future__ import annotations

import os

_flag = os.environ.get("RECONSUME_NO_NUMBA", "").strip().lower()
_force_numpy = _flag not in ("", "0", "false", "no")

if _force_numpy:
    from . import _numpy as _impl
    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl
        BACKEND = "numba"
    except ImportError:
        from . import _numpy as _impl
        BACKEND = "numpy"

day_repeat_fractions = _impl.day_repeat_fractions
across_repeat_fractions = _impl.across_repeat_fractions
em_fit_batch = _impl.em_fit_batch


def active_backend() -> str:
    """Name of the backend selected at import time: 'numba' or 'numpy'."""
    return BACKEND
