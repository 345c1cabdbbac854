"""Generators for the concrete state families with known optima.

Each family builds a validated :class:`~usdpovm.analytic.StateSet` from a
small parameter record and, where a closed form exists, attaches the known
optimal mean efficiency so the optimizer and the analytic shortcuts can be
cross-checked against an independent value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from . import analytic, optimizer
from .analytic import StateSet
from .config import TOLS
from .errors import DomainError

TWO_STATE = "two-state"
EQUAL_OVERLAP = "equal-overlap"
THREE_SYM = "three-sym"
THREE_SYM_COMPLEX = "three-sym-complex"
THREE_GENERAL = "three-general"
THREE_SUB = "three-sub"
FOUR_PARAM = "four-param"
SYMMETRIC = "symmetric"

FAMILIES = (TWO_STATE, EQUAL_OVERLAP, THREE_SYM, THREE_SYM_COMPLEX,
            THREE_GENERAL, THREE_SUB, FOUR_PARAM, SYMMETRIC)


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.n < 2:
            raise DomainError("need at least two states")


@dataclass(frozen=True)
class FamilyInstance:
    states: StateSet
    known_pm: float | None
    spec: FamilySpec


@dataclass(frozen=True)
class FamilyReport:
    spec: FamilySpec
    known_pm: float | None
    optimizer_pm: float
    analytic_pm: float | None
    residuals: Mapping[str, float]
    consistent: bool


def _param(params: Mapping[str, Any], key: str, default=None):
    if key in params:
        return params[key]
    if default is not None:
        return default
    raise DomainError(f"missing family parameter {key!r}")


def _two_state(params, n) -> tuple[np.ndarray, float | None]:
    if n != 2:
        raise DomainError("two-state family requires n=2")
    r = float(_param(params, "r"))
    alpha = float(params.get("alpha", 0.0))
    if not (0.0 < r < 1.0 / np.sqrt(2.0)):
        raise DomainError(f"r={r} outside (0, 1/sqrt(2)): eigenvalues must stay positive")
    c = np.sqrt(1.0 - r * r)
    psi = np.array([[c, r * np.exp(-1j * alpha)],
                    [r * np.exp(1j * alpha), c]])
    return psi, 1.0 - 2 * r * np.sqrt(1.0 - r * r)


def _equal_overlap(params, n) -> tuple[np.ndarray, float | None]:
    s = float(_param(params, "s"))
    if not (-1.0 / (n - 1) < s < 1.0):
        raise DomainError(f"s={s} outside (-1/{n - 1}, 1)")
    lam1 = np.sqrt(1.0 - s)
    lam_n = np.sqrt(1.0 + (n - 1) * s)
    off = (lam_n - lam1) / n
    diag = (lam_n + (n - 1) * lam1) / n
    psi = np.full((n, n), off, dtype=complex)
    np.fill_diagonal(psi, diag)
    return psi, analytic.equal_overlap_pm(n, s)


def _three_sym(params, n) -> tuple[np.ndarray, float | None]:
    if n != 3:
        raise DomainError("three-sym family requires n=3")
    lam3 = float(_param(params, "lam3"))
    if not (0.0 < lam3 < np.sqrt(3.0)):
        raise DomainError(f"lam3={lam3} outside (0, sqrt(3))")
    lam12 = np.sqrt((3.0 - lam3**2) / 2.0)
    a0 = (2 * lam12 + lam3) / 3.0
    a1 = (lam3 - lam12) / 3.0
    psi = np.full((3, 3), a1, dtype=complex)
    np.fill_diagonal(psi, a0)
    return psi, min(lam3**2, (3.0 - lam3**2) / 2.0)


def _three_sym_complex(params, n) -> tuple[np.ndarray, float | None]:
    if n != 3:
        raise DomainError("three-sym-complex family requires n=3")
    lams = np.array([float(_param(params, k)) for k in ("lam1", "lam2", "lam3")])
    if np.any(lams <= 0):
        raise DomainError("all lam_j must be positive")
    if abs((lams**2).sum() - 3.0) > 1e-9:
        # sum of squared singular values equals n for unit-norm columns
        raise DomainError(f"lam1^2+lam2^2+lam3^2 must equal 3, got {(lams**2).sum()}")
    l1, l2, l3 = lams
    a0 = (l1 + l2 + l3) / 3.0
    a2 = (l3 - np.exp(1j * np.pi / 3) * l2 - np.exp(-1j * np.pi / 3) * l1) / 3.0
    psi = np.array([[a0, a2, np.conj(a2)],
                    [np.conj(a2), a0, a2],
                    [a2, np.conj(a2), a0]])
    return psi, float((lams**2).min())


def _u3_dagger(kxy: complex, kza: complex) -> np.ndarray:
    """Orthonormal basis with the equal-coordinate vector last, the other two
    rotated by the (kxy, kza) rotation of the fixed pair
    (-2,1,1)/sqrt(6), (0,1,-1)/sqrt(2)."""
    s23 = np.sqrt(2.0 / 3.0)
    s6 = 1.0 / np.sqrt(6.0)
    s2 = 1.0 / np.sqrt(2.0)
    s3 = 1.0 / np.sqrt(3.0)
    return np.array([
        [-s23 * kza, -1j * s23 * np.conj(kxy), s3],
        [s6 * kza + 1j * s2 * kxy, 1j * s6 * np.conj(kxy) + s2 * np.conj(kza), s3],
        [s6 * kza - 1j * s2 * kxy, 1j * s6 * np.conj(kxy) - s2 * np.conj(kza), s3],
    ])


def _three_general(params, n) -> tuple[np.ndarray, float | None]:
    if n != 3:
        raise DomainError("three-general family requires n=3")
    kxy = complex(_param(params, "k_xy"))
    kza = complex(_param(params, "k_za"))
    if abs(abs(kxy) ** 2 + abs(kza) ** 2 - 1.0) > 1e-9:
        raise DomainError("|k_xy|^2 + |k_za|^2 must equal 1")
    lam3_sq = float(_param(params, "lam3")) ** 2
    m = _u3_dagger(kxy, kza)
    a12 = abs(m[0, 1]) ** 2
    a22 = abs(m[1, 1]) ** 2
    a32 = abs(m[2, 1]) ** 2
    denom = a12 - a22
    if abs(denom) < 1e-10:
        raise DomainError("degenerate rotation: normalization system is singular")
    lam1_sq = (1.0 - 3 * a22 + lam3_sq * (a22 - a32)) / denom
    lam2_sq = 3.0 - lam1_sq - lam3_sq
    if lam1_sq <= 0 or lam2_sq <= 0 or lam3_sq <= 0:
        raise DomainError(
            f"eigenvalues must be positive: lam^2 = ({lam1_sq:.4g}, {lam2_sq:.4g}, {lam3_sq:.4g})"
        )
    lam = np.sqrt([lam1_sq, lam2_sq, lam3_sq])
    psi = m.conj().T @ np.diag(lam) @ m
    return psi, None


def _three_sub(params, n) -> tuple[np.ndarray, float | None]:
    if n != 3:
        raise DomainError("three-sub family requires n=3")
    lam3 = float(_param(params, "lam3"))
    if not (0.0 < lam3 < np.sqrt(2.0)):
        raise DomainError(f"lam3={lam3} outside (0, sqrt(2))")
    return _three_general(
        {"k_xy": 0.0, "k_za": np.exp(1j * np.pi / 4), "lam3": lam3}, 3
    )


def _four_param(params, n) -> tuple[np.ndarray, float | None]:
    if n != 4:
        raise DomainError("four-param family requires n=4")
    lam = np.array([float(_param(params, k)) for k in ("lam1", "lam2", "lam3", "lam4")])
    lower_sign = bool(params.get("lower_sign", False))
    if np.any(lam <= 0):
        raise DomainError("all lam_j must be positive")
    lsq = lam**2
    if abs(lsq.sum() - 4.0) > 1e-9:
        raise DomainError(f"sum of lam_j^2 must equal 4, got {lsq.sum()}")
    if not (lsq[3] < lsq[1] < lsq[2] < lsq[0]):
        raise DomainError(
            "eigenvalue ordering lam4^2 < lam2^2 < lam3^2 < lam1^2 violated"
        )
    u4 = np.array([
        [0.0, -1.0, -np.sqrt(2.0), 1.0],
        [-np.sqrt(2.0), 1.0, 0.0, 1.0],
        [0.0, -1.0, np.sqrt(2.0), 1.0],
        [np.sqrt(2.0), 1.0, 0.0, 1.0],
    ], dtype=complex) / 2.0
    a1, a2 = u4[:, 0], u4[:, 1]
    kxy = np.sqrt((lsq[0] - lsq[2]) / (lsq[0] - lsq[1]))
    kza = np.sqrt((lsq[2] - lsq[1]) / (lsq[0] - lsq[1]))
    if lower_sign:
        kxy = -kxy
    u1 = kza * a1 + 1j * kxy * a2
    u2 = 1j * np.conj(kxy) * a1 + np.conj(kza) * a2
    basis = np.column_stack([u1, u2, u4[:, 2], u4[:, 3]])
    psi = basis @ np.diag(lam) @ basis.conj().T
    return psi, float(lsq[3])


def _symmetric(params, n) -> tuple[np.ndarray, float | None]:
    c = np.asarray(_param(params, "c"), dtype=complex).ravel()
    if c.size != n:
        raise DomainError(f"need {n} coefficients, got {c.size}")
    if abs(np.sum(np.abs(c) ** 2) - 1.0) > 1e-9:
        raise DomainError("coefficients must satisfy sum |c_k|^2 = 1")
    if np.abs(c).min() < 1e-8:
        raise DomainError("all coefficients must be nonzero (states would be dependent)")
    k = np.arange(n)
    phases = np.exp(2j * np.pi * np.outer(k, k) / n)
    psi = c[:, None] * phases
    return psi, float(n * (np.abs(c) ** 2).min())


_BUILDERS = {
    TWO_STATE: _two_state,
    EQUAL_OVERLAP: _equal_overlap,
    THREE_SYM: _three_sym,
    THREE_SYM_COMPLEX: _three_sym_complex,
    THREE_GENERAL: _three_general,
    THREE_SUB: _three_sub,
    FOUR_PARAM: _four_param,
    SYMMETRIC: _symmetric,
}


def gen(spec: FamilySpec) -> FamilyInstance:
    """Build the state set for a family specification.

    Raises ``DomainError`` naming the violated constraint when parameters
    leave the family's validity domain. The known optimal efficiency is
    attached where a closed form exists (None for the general families).
    """
    psi, known = _BUILDERS[spec.family](spec.params, spec.n)
    return FamilyInstance(StateSet(psi, family=spec.family), known, spec)


def verify_family(spec: FamilySpec,
                  config: optimizer.OptimizerConfig | None = None) -> FamilyReport:
    """Cross-check a family's known optimum against the optimizer and the
    analytic shortcut, reporting per-check residuals."""
    inst = gen(spec)
    cfg = config or optimizer.OptimizerConfig()
    res = optimizer.optimize(inst.states, config=cfg)
    verdict = analytic.symmetric_point_verdict(inst.states)
    analytic_pm = verdict.p_m if verdict.applicable else None
    residuals: dict[str, float] = {
        "chefles": res.chefles_residual,
        "duan_guo_min_eig": res.duan_guo_min_eig,
    }
    consistent = True
    if inst.known_pm is not None:
        residuals["optimizer_vs_known"] = abs(res.p_m - inst.known_pm)
        consistent &= residuals["optimizer_vs_known"] <= 1e-6
        if analytic_pm is not None:
            residuals["analytic_vs_known"] = abs(analytic_pm - inst.known_pm)
            consistent &= residuals["analytic_vs_known"] <= 1e-6
    return FamilyReport(spec, inst.known_pm, res.p_m, analytic_pm, residuals, consistent)


def random_states(n: int, seed: int, *, eig_low: float = 0.2, eig_high: float = 1.8) -> StateSet:
    """Random general state set for property tests.

    Draw a Hermitian matrix with eigenvalues in [eig_low, eig_high] and a
    Haar-random eigenbasis, then alternate Hermitian symmetrization with
    column renormalization (20 rounds, convergence 1e-12). The final column
    rescale leaves exactly unit norms but breaks exact Hermiticity, so the
    result is a general (non-Hermitian-gauge) state set.
    """
    rng = np.random.default_rng(seed)
    while True:
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        q, _ = np.linalg.qr(z)
        vals = rng.uniform(eig_low, eig_high, size=n)
        b = (q * vals) @ q.conj().T
        for _ in range(20):
            b = (b + b.conj().T) / 2
            norms = np.linalg.norm(b, axis=0)
            if np.abs(norms - 1.0).max() < 1e-12:
                break
            b = b / norms
        b = b / np.linalg.norm(b, axis=0)
        smin = np.linalg.svd(b, compute_uv=False)[-1]
        if smin > 10 * TOLS.min_singular:
            return StateSet(b, family="random")
