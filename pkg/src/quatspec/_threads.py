"""QUATSPEC_THREADS: cap on the threads used by the numeric backends (0 = auto).

Must run before numpy is first imported, since BLAS and FFT pools read their
environment at load time.
"""

from __future__ import annotations

import logging
import os

log = logging.getLogger(__name__)

_POOL_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS")


def thread_cap(environ=os.environ) -> int:
    raw = environ.get("QUATSPEC_THREADS", "").strip()
    if not raw:
        return 0
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring non-integer QUATSPEC_THREADS=%r", raw)
        return 0
    return max(n, 0)


def apply_thread_cap(environ=os.environ) -> int:
    n = thread_cap(environ)
    if n > 0:
        for var in _POOL_VARS:
            environ.setdefault(var, str(n))
    return n
