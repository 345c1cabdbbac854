"""Dense complex linear algebra kernel.

Thin, contract-checked wrappers around LAPACK (via numpy) used by every
other module: Hermitian eigendecomposition, SVD, PSD square roots, inverses
and positive-semidefiniteness tests. All functions are pure and the returned
arrays are fresh allocations, safe to share between threads.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .config import TOLS, Tolerances
from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NotHermitianError,
    NotPositiveSemidefiniteError,
    SingularMatrixError,
)


class HermEig(NamedTuple):
    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # orthonormal columns


class SvdResult(NamedTuple):
    left: np.ndarray          # unitary
    singulars: np.ndarray     # nonnegative, descending
    right: np.ndarray         # unitary (M = left @ diag(singulars) @ right)


class PsdReport(NamedTuple):
    is_psd: bool
    min_eigenvalue: float


def dagger(m: np.ndarray) -> np.ndarray:
    """Hermitian adjoint."""
    return m.conj().T


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatchError(f"{name} must be a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def require_hermitian(h, tol: float = TOLS.hermiticity) -> np.ndarray:
    """Validate Hermitian symmetry and return the exactly symmetrized matrix."""
    a = as_complex_matrix(h, "Hermitian input")
    if a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"matrix is not square: shape {a.shape}")
    asym = np.abs(a - dagger(a)).max()
    if asym > tol:
        raise NotHermitianError(f"Hermitian symmetry violated: max |H - H^dag| = {asym:.3e}")
    return (a + dagger(a)) / 2


def herm_eig(h, *, tols: Tolerances = TOLS) -> HermEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    a = require_hermitian(h, tols.hermiticity)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"Hermitian eigensolver failed: {exc}") from exc
    return HermEig(w, v)


def svd(m, *, tols: Tolerances = TOLS) -> SvdResult:
    """Singular value decomposition M = left @ diag(s) @ right."""
    a = as_complex_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"SVD failed: {exc}") from exc
    return SvdResult(u, s, vh)


def herm_sqrt(h, *, tols: Tolerances = TOLS) -> np.ndarray:
    """Hermitian square root of a PSD matrix.

    Eigenvalues in [-psd_clamp, 0) are clamped to zero so that matrices
    sitting exactly on the PSD boundary (where every optimal POVM lives)
    stay well defined; anything below the window raises.
    """
    w, v = herm_eig(h, tols=tols)
    if w[0] < -tols.psd_clamp:
        raise NotPositiveSemidefiniteError(
            f"matrix is not PSD: min eigenvalue {w[0]:.3e} < -{tols.psd_clamp:.0e}"
        )
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)
    return (root + dagger(root)) / 2


def inv_sqrt(h, *, floor: float = TOLS.inv_sqrt_floor, tols: Tolerances = TOLS) -> np.ndarray:
    """Hermitian inverse square root with an eigenvalue floor.

    The floor keeps near-singular inputs finite so downstream residual checks
    produce a diagnostic instead of an overflow.
    """
    w, v = herm_eig(h, tols=tols)
    if w[0] < -tols.psd_clamp:
        raise NotPositiveSemidefiniteError(
            f"matrix is not PSD: min eigenvalue {w[0]:.3e}"
        )
    w = np.maximum(w, floor)
    res = (v * (1.0 / np.sqrt(w))) @ dagger(v)
    return (res + dagger(res)) / 2


def inverse(m, *, tols: Tolerances = TOLS) -> np.ndarray:
    """Matrix inverse, refused for near-singular input.

    A condition number above ``tols.max_condition`` signals linearly
    dependent states upstream and raises ``SingularMatrixError``.
    """
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"cannot invert non-square matrix {a.shape}")
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] == 0.0 or s[0] / s[-1] > tols.max_condition:
        raise SingularMatrixError(
            f"matrix is singular or ill-conditioned (cond ~ {s[0] / max(s[-1], 1e-300):.3e})"
        )
    try:
        return np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by cond check
        raise SingularMatrixError(str(exc)) from exc


def is_psd(h, tol: float = TOLS.duan_guo, *, tols: Tolerances = TOLS) -> PsdReport:
    """Positive semidefiniteness test: true iff min eigenvalue >= -tol."""
    w, _ = herm_eig(h, tols=tols)
    return PsdReport(bool(w[0] >= -tol), float(w[0]))


def degenerate_groups(values: np.ndarray, rel_tol: float = TOLS.degeneracy) -> list[list[int]]:
    """Group sorted eigenvalues into clusters of numerically equal values.

    Two eigenvalues belong to one cluster when |a - b| <= rel_tol * max(1, |a|).
    """
    vals = np.asarray(values, dtype=float)
    order = np.argsort(vals)
    groups: list[list[int]] = []
    for idx in order:
        if groups and abs(vals[idx] - vals[groups[-1][-1]]) <= rel_tol * max(1.0, abs(vals[idx])):
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups
