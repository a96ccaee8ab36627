"""Backend selection for the sampling kernel.

The compiled extension is used when it was built; otherwise the numpy
version.  ``FIVECARD_BACKEND=python`` forces the fallback and
``FIVECARD_BACKEND=cython`` makes a missing extension an import error.
"""
import os

from . import _kernels_py

_choice = os.environ.get("FIVECARD_BACKEND", "auto").lower()
if _choice not in ("auto", "cython", "python"):
    raise ImportError(f"FIVECARD_BACKEND must be auto, cython or python, not {_choice!r}")

_compiled = None
if _choice != "python":
    try:
        from . import _ckernels as _compiled
    except ImportError:
        if _choice == "cython":
            raise

if _compiled is not None:
    BACKEND = "cython"
    sample_joint_counts = _compiled.sample_joint_counts
else:
    BACKEND = "python"
    sample_joint_counts = _kernels_py.sample_joint_counts

BACKENDS = {"python": _kernels_py.sample_joint_counts}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.sample_joint_counts
