"""Backend selection for the batched hot kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise, or
when ``OPMETRIC_PURE_PYTHON`` is set to a non-empty value, the numpy
implementation in ``_pykernels`` is used. Both expose ``hat_batch``,
``kob_norm_pairs``, ``kob_norm_cross`` and ``eta_batch``.
"""
import os

from . import _pykernels

if os.environ.get("OPMETRIC_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

# keeps the numpy fallback's temporaries bounded for large cross products
_CHUNK_PAIRS = 20000


def available_backends():
    """Map of backend name to module, for tests and benchmarks."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out


def hat_batch(t):
    return _impl.hat_batch(t)


def kob_norm_pairs(x, y):
    return _impl.kob_norm_pairs(x, y)


def kob_norm_cross(x, y):
    if _impl is _pykernels and len(x) * len(y) > _CHUNK_PAIRS:
        import numpy as np

        step = max(1, _CHUNK_PAIRS // max(1, len(y)))
        return np.vstack(
            [_impl.kob_norm_cross(x[i : i + step], y) for i in range(0, len(x), step)]
        )
    return _impl.kob_norm_cross(x, y)


def eta_batch(a, z):
    return _impl.eta_batch(a, z)
