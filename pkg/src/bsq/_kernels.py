"""Pick the compiled lattice kernel when it is built, else the numpy one.

Set ``BSQ_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _lattice_py

if os.environ.get("BSQ_PURE_PYTHON"):
    classify_range = _lattice_py.classify_range
    BACKEND = "python"
else:
    try:
        from ._lattice import classify_range
        BACKEND = "compiled"
    except ImportError:
        classify_range = _lattice_py.classify_range
        BACKEND = "python"

python_classify_range = _lattice_py.classify_range
