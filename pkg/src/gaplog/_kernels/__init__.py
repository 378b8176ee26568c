"""Kernel backend selection.

The compiled Cython kernels are used when the extension built; otherwise the
pure-Python fallback takes over transparently. Set GAPLOG_BACKEND=python to
force the fallback (used by the backend benchmark and parity tests).
"""

from __future__ import annotations

import os

from .compile import (  # noqa: F401  (re-exported)
    KIND_CLASSICAL,
    KIND_GATED_AND,
    KIND_SIGN_SUM,
    CompiledProgram,
    compile_program,
    compiled,
)
from .pybackend import (  # noqa: F401
    CONFLICT_ANNOSET,
    CONFLICT_CROSS,
    STATUS_BOUND_EXCEEDED,
    STATUS_CONFLICT,
    STATUS_FIXPOINT,
)

if os.environ.get("GAPLOG_BACKEND", "").lower() == "python":
    from . import pybackend as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "c"
    except ImportError:
        from . import pybackend as _impl

        BACKEND = "python"

apply_once = _impl.apply_once
run_fixpoint = _impl.run_fixpoint
brute_force_scan = _impl.brute_force_scan
