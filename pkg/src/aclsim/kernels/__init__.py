"""Hot numeric kernels, numba-compiled with a pure-numpy fallback.

The numba backend is used when importable unless the environment variable
``ACLSIM_DISABLE_NUMBA`` is set to 1/true/yes, in which case the numpy
reference implementations are used. ``BACKEND`` reports the active choice;
``benchmarks/bench_kernels.py`` compares the two.
"""

import os

from . import _numpy_impl

numpy_impl = _numpy_impl
numba_impl = None


def _numba_disabled() -> bool:
    return os.environ.get("ACLSIM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")


BACKEND = "numpy"
if not _numba_disabled():
    try:
        from . import _numba_impl

        numba_impl = _numba_impl
        BACKEND = "numba"
    except ImportError:  # numba not installed: numpy fallback
        pass

_active = numba_impl if BACKEND == "numba" else numpy_impl

phase_evolve = _active.phase_evolve
partial_trace_env = _active.partial_trace_env
partial_trace_sys = _active.partial_trace_sys
hermite_functions = _active.hermite_functions
entropy_from_eigs = _active.entropy_from_eigs
positive_variation = _active.positive_variation

# gemm-shaped reductions: the BLAS formulation beats compiled loops at
# production sizes (bench_kernels.py: 0.9ms vs 3ms and 1.7ms vs 19ms at
# (16, 64, 64)), so both backends bind the numpy implementation
branch_reduce_sys = numpy_impl.branch_reduce_sys
branch_reduce_env = numpy_impl.branch_reduce_env

__all__ = [
    "BACKEND",
    "numpy_impl",
    "numba_impl",
    "phase_evolve",
    "partial_trace_env",
    "partial_trace_sys",
    "branch_reduce_sys",
    "branch_reduce_env",
    "hermite_functions",
    "entropy_from_eigs",
    "positive_variation",
]
