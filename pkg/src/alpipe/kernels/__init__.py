"""Hot numeric kernels with a compiled core and a pure-numpy fallback.

The compiled extension is preferred; set ALPIPE_PURE_PYTHON=1 to force the
fallback. BACKEND reports which one is active.
"""

import os

if os.environ.get("ALPIPE_PURE_PYTHON"):
    from alpipe.kernels import pure as _impl

    BACKEND = "pure"
else:
    try:
        from alpipe.kernels import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        from alpipe.kernels import pure as _impl

        BACKEND = "pure"

# the numpy expansion rides on BLAS matmul and beats a compiled loop here
# (see benchmarks/bench_kernels.py), so it is used on every backend
from alpipe.kernels.pure import pairwise_sq_dists

update_min_sq_dists = _impl.update_min_sq_dists
best_gini_split = _impl.best_gini_split

__all__ = [
    "BACKEND",
    "pairwise_sq_dists",
    "update_min_sq_dists",
    "best_gini_split",
]
