"""Element-matrix kernels with a compiled fast path.

The Cython extension is attempted first; when it is missing (no
compiler at install time) the numpy implementation is used. Both
backends evaluate the same formulas; ``benchmarks/bench_assembly.py``
compares their throughput.
"""
from . import assembly_py

try:  # pragma: no cover - depends on the build environment
    from . import _assembly_cy

    _active = _assembly_cy
    BACKEND = "cython"
except ImportError:  # pragma: no cover
    _active = assembly_py
    BACKEND = "python"


def available_backends() -> dict:
    """Backend name -> module, for cross-checks and benchmarks."""
    out = {"python": assembly_py}
    if _active is not assembly_py:
        out["cython"] = _active
    return out


lagrange1_local = _active.lagrange1_local
lagrange2_local = _active.lagrange2_local
morley_local = _active.morley_local
