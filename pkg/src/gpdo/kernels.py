"""Backend selection for the displacement-operator kernels.

The compiled extension is used when it is importable, unless the
environment variable ``GPDO_PURE_PYTHON`` is set to a non-empty value.
"""

import os

from . import _kernels_py

BACKEND = "python"

if not os.environ.get("GPDO_PURE_PYTHON"):
    try:
        from . import _kernels_c as _impl

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _kernels_py
else:
    _impl = _kernels_py

accumulate = _impl.accumulate
trace_coeffs = _impl.trace_coeffs
displacement_matrix = _impl.displacement_matrix
radial_table = _kernels_py.radial_table
