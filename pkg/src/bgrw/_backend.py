"""Kernel lane selection: compiled extension with a pure-Python fallback.

Set BGRW_BACKEND=python to force the fallback or BGRW_BACKEND=compiled to
require the extension. The lanes produce bit-identical results (enforced by
tests); the switch only trades speed.
"""
from __future__ import annotations

import os

_choice = os.environ.get("BGRW_BACKEND", "").strip().lower()

if _choice in ("", "c", "compiled"):
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        if _choice:
            raise ImportError(
                "BGRW_BACKEND=compiled but the extension is not built; "
                "reinstall the package or unset the variable"
            )
        from . import _pykernels as _impl

        BACKEND = "python"
elif _choice in ("py", "python", "pure"):
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    raise ValueError(f"unrecognized BGRW_BACKEND value {_choice!r}")

run_summary = _impl.run_summary
run_loop = _impl.run_loop
run_coupled = _impl.run_coupled
run_corridor_watch = _impl.run_corridor_watch
sample_step_outcomes = _impl.sample_step_outcomes


def get_backend(name: str):
    """Fetch a lane by name ("python" or "compiled"), for benchmarks/tests."""
    if name == "python":
        from . import _pykernels

        return _pykernels
    if name == "compiled":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
