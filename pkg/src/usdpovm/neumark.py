"""Unitary extension of a discrimination POVM to a projective measurement.

The (N + N_a)-dimensional unitary has block form [[Xi, Xi~], [Z, Y]] with
the detector matrix Xi (here: the scaled reciprocals Xi_x) and the ancilla
matrix Xi~ on top; the bottom blocks are

    Z = V Xi~^dag (Xi Xi^dag)^(-1/2) Xi,
    Y = -V (Xi~^dag Xi~)^(-1) Xi~^dag (Xi Xi^dag)^(1/2) Xi~,

for any unitary V (default identity). For a square Xi~ the choice
V = (Xi Xi^dag)^(-1/2) Xi collapses Z, Y to (Xi~, -Xi), i.e. the
tensor-product form sigma_z (x) Xi + sigma_x (x) Xi~ on a two-level ancilla.
Embedding a state as (psi; 0) and rotating reproduces the POVM statistics
exactly: the first N outcome weights are the detector probabilities and the
trailing N_a sum to the inconclusive probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .analytic import state_matrix
from .config import TOLS, Tolerances
from .errors import (
    DimensionMismatchError,
    NotCompletionError,
    RankDeficientError,
)
from .linalg import dagger


@dataclass(frozen=True)
class NeumarkUnitary:
    u: np.ndarray
    n: int
    n_a: int
    xi: np.ndarray          # (n, n) top-left block
    xi_tilde: np.ndarray    # (n, n_a) top-right block
    z: np.ndarray           # (n_a, n)
    y: np.ndarray           # (n_a, n_a)
    tensor_form: bool


def polar_unitary(xi, *, tols: Tolerances = TOLS) -> np.ndarray:
    """Unitary polar factor (Xi Xi^dag)^(-1/2) Xi, computed as U V^dag from
    the SVD so it stays exactly unitary even for ill-conditioned input."""
    xi = linalg.as_complex_matrix(xi, "xi")
    u, _, vh = np.linalg.svd(xi)
    return u @ vh


def _check_completion(xi: np.ndarray, xi_tilde: np.ndarray, tols: Tolerances) -> None:
    n = xi.shape[0]
    if xi.shape != (n, n):
        raise DimensionMismatchError(f"xi must be square, got {xi.shape}")
    if xi_tilde.shape[0] != n:
        raise DimensionMismatchError(
            f"xi_tilde must have {n} rows, got {xi_tilde.shape}"
        )
    if xi_tilde.shape[1] > n:
        raise DimensionMismatchError("ancilla dimension cannot exceed n")
    resid = np.abs(xi @ dagger(xi) + xi_tilde @ dagger(xi_tilde) - np.eye(n)).max()
    if resid > tols.povm_factor:
        raise NotCompletionError(
            f"Xi Xi^dag + Xi~ Xi~^dag differs from identity by {resid:.3e}"
        )


def extend(xi, xi_tilde, v: np.ndarray | None = None, *, tols: Tolerances = TOLS) -> NeumarkUnitary:
    """Complete (Xi, Xi~) to a unitary on the extended space.

    Preconditions: Xi Xi^dag + Xi~ Xi~^dag = I, the ancilla columns are
    linearly independent, and ``v`` (if given) is unitary of the ancilla
    size. The choice of ``v`` only rotates the bottom blocks.

    The blocks are evaluated through SVD polar factors rather than the
    literal inverse square roots, which keeps the result unitary to machine
    precision even when some weights vanish (zero detector columns).
    """
    xi = linalg.as_complex_matrix(xi, "xi")
    xi_tilde = np.atleast_2d(linalg.as_complex_matrix(xi_tilde, "xi_tilde"))
    _check_completion(xi, xi_tilde, tols)
    n = xi.shape[0]
    n_a = xi_tilde.shape[1]

    sv = np.linalg.svd(xi_tilde, compute_uv=False)
    if sv[-1] ** 2 <= tols.inv_sqrt_floor:
        raise RankDeficientError(
            f"ancilla columns are linearly dependent (min singular value {sv[-1]:.3e})"
        )

    if v is None:
        v = np.eye(n_a, dtype=complex)
    else:
        v = np.asarray(v, dtype=complex)
        if v.shape != (n_a, n_a):
            raise DimensionMismatchError(f"v must be {n_a}x{n_a}, got {v.shape}")
        if np.abs(dagger(v) @ v - np.eye(n_a)).max() > tols.orthonormality:
            raise DimensionMismatchError("v is not unitary")

    # Z = V Xi~^dag (Xi Xi^dag)^(-1/2) Xi: the trailing factor is the polar
    # unitary of Xi
    z = v @ dagger(xi_tilde) @ polar_unitary(xi, tols=tols)
    # Y = -V (Xi~^dag Xi~)^(-1) Xi~^dag (Xi Xi^dag)^(1/2) Xi~ collapses, via
    # the completion identity, to -V q sqrt(1 - s^2) q^dag with Xi~ = p s q^dag
    _, s_t, qh = np.linalg.svd(xi_tilde, full_matrices=False)
    y = -v @ (dagger(qh) * np.sqrt(np.clip(1.0 - s_t**2, 0.0, None))) @ qh

    u = np.block([[xi, xi_tilde], [z, y]])
    resid = np.abs(dagger(u) @ u - np.eye(n + n_a)).max()
    if resid > tols.unitarity:
        raise NotCompletionError(f"extension failed unitarity by {resid:.3e}")
    return NeumarkUnitary(u, n, n_a, xi, xi_tilde, z, y, tensor_form=False)


def extend_tensor(xi, xi_tilde, *, tols: Tolerances = TOLS) -> NeumarkUnitary:
    """Two-level-ancilla form [[Xi, Xi~], [Xi~, -Xi]] for N_a = N.

    Needs a square ancilla block from the full-rank construction (the
    canonical rotation makes Xi Xi~^dag Hermitian, which the off-diagonal
    cancellation relies on).
    """
    xi = linalg.as_complex_matrix(xi, "xi")
    xi_tilde = linalg.as_complex_matrix(xi_tilde, "xi_tilde")
    n = xi.shape[0]
    if xi_tilde.shape != (n, n):
        raise DimensionMismatchError(
            f"tensor form needs a square ancilla block, got {xi_tilde.shape}"
        )
    _check_completion(xi, xi_tilde, tols)
    u = np.block([[xi, xi_tilde], [xi_tilde, -xi]])
    resid = np.abs(dagger(u) @ u - np.eye(2 * n)).max()
    if resid > tols.unitarity:
        raise NotCompletionError(
            f"tensor extension failed unitarity by {resid:.3e}; "
            "xi_tilde must come from the full-rank ancilla construction"
        )
    return NeumarkUnitary(u, n, n, xi, xi_tilde, xi_tilde.copy(), -xi.copy(),
                          tensor_form=True)


def block_residuals(ext: NeumarkUnitary) -> dict[str, float]:
    """Max-norm residuals of the three block equations."""
    xi, xt, z, y = ext.xi, ext.xi_tilde, ext.z, ext.y
    eye_n = np.eye(ext.n)
    eye_a = np.eye(ext.n_a)
    return {
        "columns_first": float(np.abs(dagger(xi) @ xi + dagger(z) @ z - eye_n).max()),
        "columns_last": float(np.abs(dagger(xt) @ xt + dagger(y) @ y - eye_a).max()),
        "cross": float(np.abs(dagger(xi) @ xt + dagger(z) @ y).max()),
        "unitarity": float(np.abs(dagger(ext.u) @ ext.u - np.eye(ext.n + ext.n_a)).max()),
    }


def project_statistics(ext: NeumarkUnitary, psi) -> np.ndarray:
    """Outcome table of the projective measurement on embedded states.

    Row j holds the n + n_a outcome probabilities for state psi_j embedded
    as (psi_j; 0): columns 0..n-1 are the detector probabilities
    <psi_j|Pi_k|psi_j> and the trailing n_a columns sum to the inconclusive
    probability. Rows sum to one because the extension is unitary.
    """
    m = state_matrix(psi)
    if m.shape[0] != ext.n:
        raise DimensionMismatchError(
            f"states have dimension {m.shape[0]}, extension expects {ext.n}"
        )
    embedded = np.vstack([m, np.zeros((ext.n_a, ext.n), dtype=complex)])
    rotated = dagger(ext.u) @ embedded
    return (np.abs(rotated) ** 2).T
