"""Kernel backend selection.

The compiled extension is preferred; set ``THZTURB_PURE_PYTHON=1`` to
force the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("THZTURB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

mie_ab = _impl.mie_ab
losc_pair_sum = _impl.losc_pair_sum

# shared helpers live only in the Python module
nc_exponent = _kernels_py.nc_exponent
nc_separation_factor = _kernels_py.nc_separation_factor
NC_COEFF = _kernels_py.NC_COEFF
NC_COEFF_EQUAL = _kernels_py.NC_COEFF_EQUAL
TIE_QUANTUM = _kernels_py.TIE_QUANTUM
