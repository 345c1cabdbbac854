"""Closed-form solvers and shortcut tests that bypass numerical optimization.

Covers: the Hermitian gauge of a state set, the symmetric-point optimality
test through the lowest eigenvector, the two-distinct-eigenvalue shortcut,
the equal-overlap closed form, the full two-state solution with its
projective-measurement regime, and circulant-Gram (symmetric state) sets.

Every shortcut except the two-state solver assumes equiprobable states; the
caller is responsible for routing non-uniform priors to the numerical path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.optimize import minimize

from .config import TOLS, Tolerances
from .errors import DomainError, SingularMatrixError
from . import linalg
from .linalg import dagger

RULE_LOWEST_EIGENVECTOR = "lowest-eigenvector"
RULE_TWO_EIGENVALUE = "two-eigenvalue"
RULE_CIRCULANT = "circulant"
RULE_TWO_STATE = "two-state"
RULE_NONE = "none"

REGIME_POVM = "povm"
REGIME_VON_NEUMANN = "von-neumann"


@dataclass(frozen=True)
class StateSet:
    """N linearly independent unit-norm states, collected as matrix columns."""

    matrix: np.ndarray
    family: str | None = None

    def __post_init__(self):
        m = linalg.as_complex_matrix(self.matrix, "state matrix")
        if m.shape[0] != m.shape[1]:
            raise SingularMatrixError(
                f"need as many states as dimensions, got shape {m.shape}"
            )
        norms = np.linalg.norm(m, axis=0)
        if np.abs(norms - 1.0).max() > TOLS.unit_norm:
            raise DomainError(
                f"states must be normalized to unity (max deviation {np.abs(norms - 1).max():.3e})"
            )
        smin = np.linalg.svd(m, compute_uv=False)[-1]
        if smin < TOLS.min_singular:
            raise SingularMatrixError(
                f"states are linearly dependent (min singular value {smin:.3e})"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def state_matrix(psi) -> np.ndarray:
    """Accept a StateSet or a raw array; validate and return the matrix."""
    if isinstance(psi, StateSet):
        return psi.matrix
    return StateSet(np.asarray(psi, dtype=complex)).matrix


@dataclass(frozen=True)
class AnalyticVerdict:
    """Outcome of a shortcut test.

    ``applicable`` False never claims the shortcut value is wrong, only that
    this particular sufficient condition was not established.
    """

    applicable: bool
    p_m: float | None = None
    weights: np.ndarray | None = None
    rule: str = RULE_NONE
    certificate: Mapping[str, Any] = field(default_factory=dict)


def gram(psi) -> np.ndarray:
    """Overlap matrix Psi^dagger Psi: Hermitian, PSD, unit diagonal."""
    m = state_matrix(psi)
    a = dagger(m) @ m
    return (a + dagger(a)) / 2


def hermitize(psi) -> np.ndarray:
    """Hermitian positive-definite gauge of a state set.

    Returns the Hermitian polar factor (Psi^dag Psi)^(1/2): same singular
    spectrum, same overlap matrix, columns still unit norm, so every
    discrimination quantity (optimal weights, efficiency) is unchanged.
    """
    return linalg.herm_sqrt(gram(psi))


def equal_overlap_pm(n: int, s: float) -> float:
    """Optimal mean efficiency for n states with all pairwise overlaps s.

    Valid for real s in (-1/(n-1), 1); equals 1 - s for s > 0 and
    1 + (n-1) s for s < 0, continuous at s = 0.
    """
    if n < 2:
        raise DomainError("need at least two states")
    s = float(s)
    if not (-1.0 / (n - 1) < s < 1.0):
        raise DomainError(f"overlap s={s} outside (-1/{n - 1}, 1)")
    return 1.0 - s + n * (s - abs(s)) / 2.0


def _equal_modulus_vector(
    basis: np.ndarray, *, seed: int = 0, restarts: int = 50, tol: float = TOLS.coord_moduli
) -> np.ndarray | None:
    """Search a subspace (orthonormal columns of ``basis``) for a unit vector
    whose coordinates all have modulus N^(-1/2).

    Bounded numerical search: minimize the spread of |coordinates|^2 over the
    subspace from ``restarts`` random starts; returns the vector on success,
    None when no start reaches the threshold.
    """
    n, k = basis.shape
    target = 1.0 / n
    if k == n:
        return np.full(n, 1.0 / np.sqrt(n), dtype=complex)

    def coords(params: np.ndarray) -> np.ndarray:
        a = params[:k] + 1j * params[k:]
        nrm = np.linalg.norm(a)
        if nrm == 0.0:
            return basis[:, 0]
        return basis @ (a / nrm)

    def objective(params: np.ndarray) -> float:
        v = coords(params)
        return float(np.sum((np.abs(v) ** 2 - target) ** 2))

    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        start = rng.normal(size=2 * k)
        res = minimize(objective, start, method="Nelder-Mead",
                       options=dict(xatol=1e-12, fatol=1e-18, maxiter=4000, maxfev=8000))
        v = coords(res.x)
        if np.abs(np.abs(v) - 1.0 / np.sqrt(n)).max() <= tol:
            return v
    return None


def symmetric_point_verdict(psi, *, seed: int = 0, tols: Tolerances = TOLS) -> AnalyticVerdict:
    """Test whether the symmetric point is provably optimal for uniform priors.

    Established routes, tried in order on the Hermitian gauge:

    1. the lowest eigenvalue lam_m is simple and its eigenvector has all
       coordinate moduli equal to N^(-1/2)  ->  P_M = lam_m^2, X = lam_m I;
    2. the spectrum has exactly two distinct values, one (N-1)-fold
       degenerate  ->  P_M = min over the squared spectrum;
    3. the lowest eigenvalue is degenerate: bounded random search for an
       equal-modulus vector inside the eigenspace.

    A failed search yields ``applicable=False`` (not established), never a
    claim of non-optimality.
    """
    m = state_matrix(psi)
    n = m.shape[0]
    h = hermitize(m)
    w, v = linalg.herm_eig(h, tols=tols)
    groups = linalg.degenerate_groups(w, tols.degeneracy)
    low = groups[0]
    lam_m = float(w[low].mean())
    weights = np.full(n, lam_m)

    # two distinct values, one of multiplicity N-1 (spectrum test alone suffices)
    if len(groups) == 2 and {len(groups[0]), len(groups[1])} == {1, n - 1}:
        return AnalyticVerdict(
            True,
            p_m=lam_m**2,
            weights=weights,
            rule=RULE_TWO_EIGENVALUE,
            certificate={
                "eigenvalues": w.tolist(),
                "low_multiplicity": len(low),
            },
        )

    if len(low) == 1:
        moduli = np.abs(v[:, low[0]])
        if np.abs(moduli - 1.0 / np.sqrt(n)).max() <= tols.coord_moduli:
            return AnalyticVerdict(
                True,
                p_m=lam_m**2,
                weights=weights,
                rule=RULE_LOWEST_EIGENVECTOR,
                certificate={
                    "low_eigenvalue": lam_m,
                    "eigenvector_moduli": moduli.tolist(),
                },
            )
        return AnalyticVerdict(
            False,
            rule=RULE_NONE,
            certificate={
                "low_eigenvalue": lam_m,
                "eigenvector_moduli": moduli.tolist(),
                "reason": "lowest eigenvector moduli are not all N^(-1/2)",
            },
        )

    # degenerate lowest eigenspace: bounded sub-search
    found = _equal_modulus_vector(v[:, low], seed=seed, tol=tols.coord_moduli)
    if found is not None:
        return AnalyticVerdict(
            True,
            p_m=lam_m**2,
            weights=weights,
            rule=RULE_LOWEST_EIGENVECTOR,
            certificate={
                "low_eigenvalue": lam_m,
                "low_multiplicity": len(low),
                "eigenvector_moduli": np.abs(found).tolist(),
            },
        )
    return AnalyticVerdict(
        False,
        rule=RULE_NONE,
        certificate={
            "low_eigenvalue": lam_m,
            "low_multiplicity": len(low),
            "reason": "no equal-modulus vector found in the degenerate eigenspace",
        },
    )


def is_circulant(a: np.ndarray, tol: float = TOLS.circulant) -> bool:
    """True when entry (j, k) depends only on (k - j) mod n within ``tol``."""
    a = np.asarray(a)
    n = a.shape[0]
    j, k = np.indices((n, n))
    expected = a[0, (k - j) % n]
    return bool(np.abs(a - expected).max() <= tol)


def circulant_eigenvalues(first_row: np.ndarray) -> np.ndarray:
    """Eigenvalues F(eps^p) = sum_k row_k eps^(p k) of a circulant matrix,
    eps = exp(2 pi i / n), p = 0..n-1."""
    row = np.asarray(first_row, dtype=complex)
    n = row.size
    p = np.arange(n)
    eps_pk = np.exp(2j * np.pi * np.outer(p, p) / n)
    return eps_pk @ row


def circulant_solve(psi, *, tols: Tolerances = TOLS) -> AnalyticVerdict:
    """Shortcut for symmetric state sets, detected via a circulant overlap matrix.

    The overlap matrix of symmetric states is circulant and conversely, so
    its eigenvalues - the squared singular values of the state matrix - come
    from the first row alone, and the optimal efficiency is their minimum.
    All circulant eigenvectors have coordinate moduli N^(-1/2), hence the
    symmetric point is optimal and the weights are lam_min I.
    """
    a = gram(psi)
    n = a.shape[0]
    if not is_circulant(a, tols.circulant):
        return AnalyticVerdict(False, rule=RULE_NONE,
                               certificate={"reason": "overlap matrix is not circulant"})
    eigs = circulant_eigenvalues(a[0])
    # Hermitian PSD circulant: eigenvalues are real and nonnegative
    lam_sq = np.clip(eigs.real, 0.0, None)
    p_m = float(lam_sq.min())
    lam = np.sqrt(p_m)
    return AnalyticVerdict(
        True,
        p_m=p_m,
        weights=np.full(n, lam),
        rule=RULE_CIRCULANT,
        certificate={
            "gram_first_row": a[0].tolist(),
            "circulant_eigenvalues": lam_sq.tolist(),
        },
    )


@dataclass(frozen=True)
class TwoStateSolution:
    """Optimal discrimination of two states with overlap geometry (r, alpha)."""

    p_m: float
    regime: str                 # 'povm' or 'von-neumann'
    t: float                    # optimal angle in [0, pi/2]
    weights: np.ndarray         # (x_1, x_2)
    eta1: float
    r: float
    alpha: float


def two_state_threshold(r: float) -> float:
    """Prior eta_1 above which the optimal measurement is projective."""
    return 1.0 / (1.0 + 4 * r * r - 4 * r**4)


def _two_state_mu_sq(u: float, r: float, eta1: float) -> float:
    """Highest eigenvalue of Xi Y^2 Xi^dag for the Hermitian two-state set,
    as a function of u = cos(2 t)."""
    d = (1.0 - 2 * r * r) ** 2
    eta2 = 1.0 - eta1
    m = 4 * eta1 * eta2
    s = (1.0 + u * (2 * eta1 - 1.0)) / m        # (a + b) / 2
    q = d * (1.0 - u * u) / m                   # det scaled: a b D
    disc = max(s * s - q, 0.0)
    return (s + np.sqrt(disc)) / d


def _two_state_dmu_du(u: float, r: float, eta1: float) -> float:
    d = (1.0 - 2 * r * r) ** 2
    eta2 = 1.0 - eta1
    m = 4 * eta1 * eta2
    k = 2 * eta1 - 1.0
    s = (1.0 + u * k) / m
    q = d * (1.0 - u * u) / m
    sp = k / m
    qp = -2.0 * d * u / m
    disc = max(s * s - q, 1e-300)
    return (sp + (2 * s * sp - qp) / (2 * np.sqrt(disc))) / d


def two_state_solve(r: float, alpha: float, eta1: float, *, tol_t: float = 1e-12) -> TwoStateSolution:
    """Optimal two-state discrimination for overlap parameter r and prior eta1.

    Parameters
    ----------
    r : float
        Off-diagonal magnitude of the Hermitian unit-norm state matrix;
        the states' overlap is 2 r sqrt(1-r^2). Requires 0 < r < 1/sqrt(2).
    alpha : float
        Off-diagonal phase; does not affect the efficiency.
    eta1 : float
        Prior of the first state, 1/2 <= eta1 < 1 (relabel states otherwise).

    Above the threshold 1/(1+4r^2-4r^4) the optimum is projective: the less
    likely state is never identified (x_2 = 0) and P_M = eta1 (1-2r^2)^2.
    Below it, the unique interior stationary point of the highest eigenvalue
    is bracketed by bisection on its derivative (at most one interior root).
    """
    if not (0.0 < r < 1.0 / np.sqrt(2.0)):
        raise DomainError(f"r={r} outside (0, 1/sqrt(2))")
    if not (0.5 <= eta1 < 1.0):
        raise DomainError(f"eta1={eta1} outside [1/2, 1)")
    eta = np.array([eta1, 1.0 - eta1])

    if eta1 > two_state_threshold(r):
        t = np.pi / 2
        p_m = 1.0 / _two_state_mu_sq(-1.0, r, eta1)
        regime = REGIME_VON_NEUMANN
    else:
        # bisection on d(mu^2)/du over u = cos(2t) in [-1, 1]
        lo, hi = -1.0, 1.0
        flo = _two_state_dmu_du(lo, r, eta1)
        if flo >= 0.0:
            u_star = -1.0
        else:
            while hi - lo > tol_t / 2:
                mid = 0.5 * (lo + hi)
                if _two_state_dmu_du(mid, r, eta1) < 0.0:
                    lo = mid
                else:
                    hi = mid
            u_star = 0.5 * (lo + hi)
        t = 0.5 * np.arccos(np.clip(u_star, -1.0, 1.0))
        p_m = 1.0 / _two_state_mu_sq(u_star, r, eta1)
        regime = REGIME_POVM

    y = np.array([np.sin(t), np.cos(t)]) / np.sqrt(eta)
    weights = np.sqrt(p_m) * y
    if regime == REGIME_VON_NEUMANN:
        weights[1] = 0.0
    return TwoStateSolution(float(p_m), regime, float(t), weights,
                            float(eta1), float(r), float(alpha))


def two_state_parameters(psi) -> tuple[float, float]:
    """Recover (r, alpha) of the Hermitian gauge of an arbitrary two-state set."""
    m = state_matrix(psi)
    if m.shape[0] != 2:
        raise DomainError("two_state_parameters needs exactly two states")
    h = hermitize(m)
    r = float(abs(h[0, 1]))
    alpha = float(np.angle(h[1, 0]))
    return r, alpha
