"""Kernel selection: the compiled extension when built, else pure Python.

Set ``DCMPOLES_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the kernel-equivalence tests).
"""
import os

BACKEND = "python"

if os.environ.get("DCMPOLES_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._ckernels import expm_affine, find_event, propagate

        BACKEND = "cython"
    except ImportError:  # extension not built
        pass

if BACKEND == "python":
    from ._pykernels import expm_affine, find_event, propagate

__all__ = ["BACKEND", "expm_affine", "find_event", "propagate"]
