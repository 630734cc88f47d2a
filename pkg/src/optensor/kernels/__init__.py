"""Hot kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when it was built and ``OPTENSOR_PURE`` is
unset; both backends return identical results.
"""
import os

from . import _pure
from ._pure import covering_relation

BACKEND = "python"
maximal_cliques = _pure.maximal_cliques

if not os.environ.get("OPTENSOR_PURE"):
    try:
        from ._ckernels import maximal_cliques  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

__all__ = ["BACKEND", "covering_relation", "maximal_cliques"]
