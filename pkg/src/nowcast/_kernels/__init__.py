"""Hot-kernel dispatch: compiled extension when built, pure NumPy otherwise.

Both backends are bit-identical by construction (see test_kernels); the
compiled one only makes tree fitting faster.  ``NOWCAST_PURE_KERNELS=1``
forces the fallback; ``set_backend`` exists for the benchmark script and
tests, not for production switching mid-run.
"""

import os

from . import _pure

try:
    from . import _speedups
except ImportError:
    _speedups = None

_active = _pure if (_speedups is None or os.environ.get("NOWCAST_PURE_KERNELS")) else _speedups


def available_backends() -> tuple[str, ...]:
    return ("python",) if _speedups is None else ("compiled", "python")


def get_backend() -> str:
    return "compiled" if _active is _speedups else "python"


def set_backend(name: str) -> None:
    global _active
    if name == "python":
        _active = _pure
    elif name == "compiled":
        if _speedups is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _speedups
    else:
        raise ValueError(f"unknown kernel backend {name!r}")


def scan_columns(xs, ys):
    return _active.scan_columns(xs, ys)
