"""Series-kernel backend selection.

Prefers the compiled extension (_series_cy) and falls back to the pure-Python
twin.  Set CROSSCAV_PURE_PYTHON=1 to force the fallback, e.g. for the
benchmark comparison or when debugging kernel numerics.
"""

import os

from . import series_py

if os.environ.get("CROSSCAV_PURE_PYTHON") == "1":
    _impl = series_py
    BACKEND = "python"
else:
    try:
        from . import _series_cy as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = series_py
        BACKEND = "python"

TOL_1F1 = series_py.TOL_1F1
MAX_TERMS_1F1 = series_py.MAX_TERMS_1F1

hyp1f1_log = _impl.hyp1f1_log
main_moments = _impl.main_moments
appendix_moments = _impl.appendix_moments


def backend_name() -> str:
    return BACKEND
