"""Kernel backend selection.

The convolution kernels dominate training time, so they come in two
implementations: numba-jitted direct loops (default when numba imports)
and a pure-numpy im2col/BLAS path. Set AEFORGE_BACKEND=numpy or
AEFORGE_BACKEND=numba to force one; AEFORGE_THREADS caps the numba
thread pool. `benchmarks/bench_kernels.py` compares the two.
"""

import os

_requested = os.environ.get("AEFORGE_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"AEFORGE_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from . import _numpy_kernels as kernels

    BACKEND = "numpy"
else:
    try:
        from . import _numba_kernels as kernels

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _numpy_kernels as kernels

        BACKEND = "numpy"

conv2d_forward = kernels.conv2d_forward
conv2d_grad_input = kernels.conv2d_grad_input
conv2d_grad_weight = kernels.conv2d_grad_weight


def thread_cap() -> int | None:
    """Worker-pool cap from AEFORGE_THREADS, or None when unset."""
    raw = os.environ.get("AEFORGE_THREADS", "").strip()
    if not raw:
        return None
    n = int(raw)
    if n < 1:
        raise RuntimeError(f"AEFORGE_THREADS must be >= 1, got {n}")
    return n
