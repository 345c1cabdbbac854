"""Detection operators, the complementary element, and ancilla vectors.

Given states Psi and feasible weights X, the rank-one detectors are built
from the scaled reciprocal states Xi_x = (Psi^dag)^(-1) X; the complement
Pi~ = I - Xi_x Xi_x^dag closes the resolution of the identity. Its numerical
rank fixes the ancilla dimension N_a, and the ancilla vector matrix Xi~
(Xi~ Xi~^dag = Pi~) is produced for any N_a from 1 to N, including the
deliberately sub-optimal rescaling that forces N_a = N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .analytic import state_matrix
from .config import TOLS, Tolerances
from .errors import DomainError, InfeasibleWeightsError, RankDeficientError
from .linalg import dagger
from .optimizer import feasibility_check


@dataclass(frozen=True)
class PovmSet:
    detectors: tuple[np.ndarray, ...]   # N rank <= 1 PSD operators
    complement: np.ndarray              # Pi~, Hermitian PSD
    ancilla_dim: int                    # numerical rank of the complement
    ancilla_vectors: np.ndarray         # (N, N_a), Xi~ Xi~^dag = Pi~

    @property
    def n(self) -> int:
        return self.complement.shape[0]


def shrink_weights(x, factor: float = 0.999) -> np.ndarray:
    """Scale weights below the optimum to push the complement to full rank.

    The optimal complement sits on the PSD boundary; shrinking by a factor
    in (0, 1) trades that much efficiency for N_a = N, which the square
    (tensor-form) extension needs. How much to sacrifice is the caller's
    choice; 0.999 gives up 0.2% of the efficiency.
    """
    if not (0.0 < factor < 1.0):
        raise DomainError(f"shrink factor must lie in (0, 1), got {factor}")
    return factor * np.asarray(x, dtype=float)


def scaled_reciprocals(psi, x) -> np.ndarray:
    """Xi_x = (Psi^dagger)^(-1) X: column j is x_j times the j-th reciprocal state."""
    m = state_matrix(psi)
    xv = np.asarray(x, dtype=float)
    if xv.shape != (m.shape[0],):
        raise DomainError(f"weights must have shape ({m.shape[0]},), got {xv.shape}")
    return linalg.inverse(dagger(m)) * xv


def _require_feasible(psi, x, tols: Tolerances) -> np.ndarray:
    report = feasibility_check(psi, x, tols.duan_guo)
    if not report.feasible:
        raise InfeasibleWeightsError(
            "weights violate the existence condition: "
            f"min-eig(Psi^dag Psi - X^2) = {report.duan_guo_min_eig:.3e}, "
            f"min-eig(I - Xi_x Xi_x^dag) = {report.complement_min_eig:.3e}"
        )
    return np.asarray(x, dtype=float)


def detection_operators(psi, x, *, tols: Tolerances = TOLS) -> list[np.ndarray]:
    """Rank-one detectors Pi_j = |xi_xj><xi_xj|.

    Click probabilities satisfy <psi_j|Pi_k|psi_j> = x_j^2 delta_jk: state j
    fires detector j with probability x_j^2 and never fires any other.
    """
    xv = _require_feasible(psi, x, tols)
    xi_x = scaled_reciprocals(psi, xv)
    return [np.outer(xi_x[:, j], xi_x[:, j].conj()) for j in range(xi_x.shape[1])]


def complement_operator(psi, x) -> np.ndarray:
    """Pi~ = I - Xi_x Xi_x^dag (exactly Hermitian by construction)."""
    xi_x = scaled_reciprocals(psi, x)
    pi_t = np.eye(xi_x.shape[0]) - xi_x @ dagger(xi_x)
    return (pi_t + dagger(pi_t)) / 2


def ancilla_dimension(psi, x, *, tols: Tolerances = TOLS) -> int:
    """Numerical rank of the complement at the eigenvalue threshold.

    The optimum sits exactly on the PSD boundary, so near-zero eigenvalues
    are expected there and must round to zero.
    """
    w, _ = linalg.herm_eig(complement_operator(psi, x), tols=tols)
    return int(np.count_nonzero(w >= tols.rank))


def ancilla_full(psi, x, *, tols: Tolerances = TOLS) -> np.ndarray:
    """Square (N x N) ancilla matrix for a full-rank complement.

    Requires I - Xi_x Xi_x^dag positive definite (e.g. after shrinking an
    optimal weight vector); a boundary complement raises RankDeficientError,
    which signals the optimal case - use :func:`ancilla_reduced` there.
    """
    xv = _require_feasible(psi, x, tols)
    xi_x = scaled_reciprocals(psi, xv)
    n = xi_x.shape[0]
    a = xi_x @ dagger(xi_x)
    w, _ = linalg.herm_eig(np.eye(n) - a, tols=tols)
    if w[0] <= tols.rank:
        raise RankDeficientError(
            f"complement is rank deficient (min eigenvalue {w[0]:.3e}); "
            "this is the optimal-boundary case, use ancilla_reduced"
        )
    root = linalg.herm_sqrt(np.eye(n) - a, tols=tols)
    # canonical rotation (Xi_x Xi_x^dag)^(-1/2) Xi_x, taken as the SVD polar
    # factor so it stays exactly unitary for near-singular weight vectors
    u_sv, _, vh_sv = np.linalg.svd(xi_x)
    return root @ (u_sv @ vh_sv)


def ancilla_reduced(psi, x, v: np.ndarray | None = None, *, tols: Tolerances = TOLS) -> np.ndarray:
    """Rectangular (N x N_a) ancilla matrix from the nonzero eigendirections.

    Diagonalize Xi_x Xi_x^dag with eigenvalues ascending, so the unit
    eigenvalues sit last; the leading N_a columns of U (I - S)^(1/2) are the
    nonzero ones and form the linearly independent ancilla set. An optional
    N_a x N_a unitary ``v`` rotates them (the physical complement is
    unchanged); default is the identity for deterministic output.
    """
    xv = _require_feasible(psi, x, tols)
    xi_x = scaled_reciprocals(psi, xv)
    n = xi_x.shape[0]
    a = xi_x @ dagger(xi_x)
    w, u = linalg.herm_eig(a, tols=tols)  # ascending: unit eigenvalues last
    comp = 1.0 - w[::-1]                  # complement spectrum, ascending
    if comp[0] < -tols.psd_clamp:
        raise InfeasibleWeightsError(
            f"complement has eigenvalue {comp[0]:.3e} below the clamp window"
        )
    gaps = np.clip(1.0 - w, 0.0, None)
    n_a = int(np.count_nonzero(gaps >= tols.rank))
    cols = u[:, :n_a] * np.sqrt(gaps[:n_a])
    if v is not None:
        v = np.asarray(v, dtype=complex)
        if v.shape != (n_a, n_a):
            raise DomainError(f"rotation must be {n_a}x{n_a}, got {v.shape}")
        if np.abs(dagger(v) @ v - np.eye(n_a)).max() > tols.orthonormality:
            raise DomainError("rotation matrix is not unitary")
        cols = cols @ v
    return cols


def complement(psi, x, *, tols: Tolerances = TOLS) -> PovmSet:
    """Assemble the full POVM: detectors, complement, and ancilla vectors.

    Routes to the square ancilla construction when the complement has full
    numerical rank and to the rectangular one otherwise. The returned set
    satisfies sum(detectors) + complement = I, complement PSD, and
    Xi~ Xi~^dag = complement.
    """
    xv = _require_feasible(psi, x, tols)
    dets = detection_operators(psi, xv, tols=tols)
    pi_t = complement_operator(psi, xv)
    n = pi_t.shape[0]
    w, _ = linalg.herm_eig(pi_t, tols=tols)
    n_a = int(np.count_nonzero(w >= tols.rank))
    if n_a == n:
        vectors = ancilla_full(psi, xv, tols=tols)
    else:
        vectors = ancilla_reduced(psi, xv, tols=tols)
    return PovmSet(tuple(dets), pi_t, n_a, vectors)
