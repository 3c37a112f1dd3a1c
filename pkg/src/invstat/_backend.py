"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy kernels.
``use()`` switches explicitly (tests and benchmarks run both).
"""
from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["native"] = _ckernels

_active = _BACKENDS.get("native", _pykernels)


def available() -> tuple[str, ...]:
    return tuple(_BACKENDS)


def name() -> str:
    return "native" if _active is _ckernels and _ckernels is not None else "python"


def use(backend: str) -> None:
    global _active
    try:
        _active = _BACKENDS[backend]
    except KeyError:
        raise ValueError(f"backend {backend!r} not available; have {available()}") from None


def kernels():
    return _active
