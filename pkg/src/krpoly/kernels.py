"""Kernel dispatch: the compiled extension when importable, else pure Python.

Set ``KRPOLY_PURE_PYTHON=1`` to force the fallback.  Compiled kernels work in
int64 and raise ``OverflowError`` on coefficient or exponent overflow; the
wrappers here then redo the call with arbitrary-precision Python integers.
"""
import os

from . import _pykernels

_impl = _pykernels
if not os.environ.get("KRPOLY_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
BITS = _pykernels.BITS
pack = _pykernels.pack
unpack = _pykernels.unpack


def _guarded(name):
    fast = getattr(_impl, name)
    slow = getattr(_pykernels, name)
    if fast is slow:
        return slow

    def call(*args):
        try:
            return fast(*args)
        except OverflowError:
            return slow(*args)

    call.__name__ = name
    call.__doc__ = slow.__doc__
    return call


add = _guarded("add")
add_scaled = _guarded("add_scaled")
mul = _guarded("mul")
shift = _guarded("shift")
mul_binomial = _guarded("mul_binomial")
mul_binomials = _guarded("mul_binomials")
div_binomial = _guarded("div_binomial")
act = _guarded("act")
eval_mod = _guarded("eval_mod")
exact_quotient = _guarded("exact_quotient")
dominant_fold = _guarded("dominant_fold")
