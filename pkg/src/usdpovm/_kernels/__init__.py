"""Backend selection for the hot eigenvalue kernel.

The compiled extension is preferred when importable; the batched-numpy
fallback is always available. Set ``USDPOVM_BACKEND=reference`` or
``USDPOVM_BACKEND=native`` to force a choice (forcing an unavailable native
backend raises at import). Both backends implement::

    top_eigenvalues(xi: (n, n) complex, ysq: (m, n) float) -> (m,) float

returning the largest eigenvalue of Xi diag(ysq[p]) Xi^dagger per row.
"""

from __future__ import annotations

import os

import numpy as np

from . import _reference

try:
    from . import _native
except ImportError:
    _native = None

_requested = os.environ.get("USDPOVM_BACKEND", "").strip().lower()
if _requested == "reference":
    _impl = _reference
elif _requested == "native":
    if _native is None:
        raise ImportError(
            "USDPOVM_BACKEND=native requested but the compiled kernel is not "
            "built; run `python setup.py build_ext --inplace` or unset the variable"
        )
    _impl = _native
elif _requested:
    raise ImportError(f"unknown USDPOVM_BACKEND value: {_requested!r}")
else:
    _impl = _native if _native is not None else _reference


def backend_name() -> str:
    """Name of the active backend: 'native' or 'reference'."""
    return _impl.NAME


def available_backends() -> tuple[str, ...]:
    return ("native", "reference") if _native is not None else ("reference",)


def get_backend(name: str):
    """Fetch a backend module by name (for benchmarks and cross-checks)."""
    if name == "reference":
        return _reference
    if name == "native" and _native is not None:
        return _native
    raise ValueError(f"backend not available: {name!r}")


def top_eigenvalues(xi: np.ndarray, ysq: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of Xi diag(ysq[p]) Xi^dagger for each row p."""
    return _impl.top_eigenvalues(xi, ysq)


def top_eigenvalue(xi: np.ndarray, ysq_row: np.ndarray) -> float:
    """Single-point variant of :func:`top_eigenvalues`."""
    return float(_impl.top_eigenvalues(xi, np.asarray(ysq_row, dtype=float)[None, :])[0])
