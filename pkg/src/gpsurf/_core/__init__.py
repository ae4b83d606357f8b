"""Core selection: compiled covariance fill when available, NumPy otherwise.

Set ``GPSURF_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the backend-equivalence tests).
"""

import os

from gpsurf._core import _pyfill as fallback

try:
    from gpsurf._core import _fillcore as compiled
except ImportError:
    compiled = None

if compiled is not None and os.environ.get("GPSURF_PURE_PYTHON", "") != "1":
    active = compiled
    backend_name = "compiled"
else:
    active = fallback
    backend_name = "python"

fill_from_lag_table_1d = active.fill_from_lag_table_1d
fill_from_lag_table_2d = active.fill_from_lag_table_2d
