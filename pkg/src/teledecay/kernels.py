"""Backend selection for the hot kernels.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is imported. Set ``TELEDECAY_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("TELEDECAY_PURE_PYTHON", "") not in ("", "0"):
    from teledecay import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from teledecay import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        from teledecay import _pykernels as _impl

        BACKEND = "python"

lindblad_rhs = _impl.lindblad_rhs
rk4_lindblad = _impl.rk4_lindblad
apply_local_kraus = _impl.apply_local_kraus

__all__ = ["BACKEND", "lindblad_rhs", "rk4_lindblad", "apply_local_kraus"]
