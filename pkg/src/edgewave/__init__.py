"""Numerical toolkit for higher-order Tracy-Widom large-gap asymptotics.

Setting EDGEWAVE_THREADS caps both the package's own worker pool and the
BLAS/OpenMP thread counts (the latter only if numpy is not imported yet).
"""

import os as _os

_threads = _os.environ.get("EDGEWAVE_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from . import asymptotics, fredholm, hierarchy, painleve2, pi2k_profile, specfun  # noqa: E402
from .specfun import alpha, chi0  # noqa: E402

__version__ = "0.1.0"

__all__ = ["asymptotics", "fredholm", "hierarchy", "painleve2", "pi2k_profile", "specfun", "alpha", "chi0"]
