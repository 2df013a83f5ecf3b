"""Backend selection for the arithmetic kernels.

The compiled extension ``mvchain._core`` is used when available; setting
``MVCHAIN_PURE_PYTHON=1`` forces the pure-Python fallback.  Both backends
expose identical functions with bit-identical results.
"""

import os

if os.environ.get("MVCHAIN_PURE_PYTHON"):
    from mvchain import _corepy as _impl
else:
    try:
        from mvchain import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        from mvchain import _corepy as _impl

BACKEND: str = _impl.BACKEND

mat_mul = _impl.mat_mul
add_scaled = _impl.add_scaled
horner_step = _impl.horner_step
vandermonde_solve_inplace = _impl.vandermonde_solve_inplace
rref = _impl.rref
