"""Angle chart on the positive orthant of the sphere / ellipsoid.

A point with N-1 angles t in the closed box [0, pi/2]^(N-1) maps to the unit
N-sphere coordinates

    g_N = cos t_1,  g_{N-1} = sin t_1 cos t_2,  ...,  g_1 = sin t_1 ... sin t_{N-1}

and to the ellipsoid with axes eta_j^(-1/2) via y_j = eta_j^(-1/2) g_j, so
that sum_j eta_j y_j^2 = 1. The box is closed (not open) because optima with
a vanishing weight sit exactly on the boundary. Angle ordering is shared by
every module: t_1 multiplies the last coordinate's cosine.
"""

from __future__ import annotations

import numpy as np

from .config import TOLS, Tolerances
from .errors import DimensionMismatchError, DomainError

HALF_PI = np.pi / 2


def check_angles(t, n: int | None = None) -> np.ndarray:
    """Validate an angle vector; returns a float array of shape (n-1,)."""
    a = np.atleast_1d(np.asarray(t, dtype=float))
    if a.ndim != 1:
        raise DimensionMismatchError(f"angles must be a vector, got shape {a.shape}")
    if n is not None and a.size != n - 1:
        raise DimensionMismatchError(f"expected {n - 1} angles for n={n}, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise DomainError("angles contain non-finite values")
    if np.any(a < -1e-12) or np.any(a > HALF_PI + 1e-12):
        raise DomainError("angles must lie in [0, pi/2]")
    return np.clip(a, 0.0, HALF_PI)


def check_priors(eta, n: int | None = None, *, tols: Tolerances = TOLS) -> np.ndarray:
    """Validate a prior probability vector: strictly positive, sums to one."""
    e = np.atleast_1d(np.asarray(eta, dtype=float))
    if e.ndim != 1:
        raise DimensionMismatchError(f"priors must be a vector, got shape {e.shape}")
    if n is not None and e.size != n:
        raise DimensionMismatchError(f"expected {n} priors, got {e.size}")
    if np.any(e <= 0.0):
        raise DomainError("all priors must be strictly positive")
    if abs(e.sum() - 1.0) > tols.priors_sum:
        raise DomainError(f"priors must sum to 1 (got {e.sum()!r})")
    return e


def uniform_priors(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def uniform_sphere_point(t, n: int) -> np.ndarray:
    """Unit-sphere coordinates g(t) of an angle point (all axes equal one)."""
    a = check_angles(t, n)
    g = np.empty(n)
    s = 1.0
    for i in range(n - 1):
        g[n - 1 - i] = s * np.cos(a[i])
        s *= np.sin(a[i])
    g[0] = s
    return g


def sphere_points(tgrid: np.ndarray, n: int) -> np.ndarray:
    """Vectorized chart: rows of ``tgrid`` (m, n-1) -> sphere points (m, n)."""
    tg = np.asarray(tgrid, dtype=float)
    if tg.ndim != 2 or tg.shape[1] != n - 1:
        raise DimensionMismatchError(f"expected grid of shape (m, {n - 1}), got {tg.shape}")
    g = np.empty((tg.shape[0], n))
    sines = np.sin(tg)
    cosines = np.cos(tg)
    running = np.ones(tg.shape[0])
    for i in range(n - 1):
        g[:, n - 1 - i] = running * cosines[:, i]
        running = running * sines[:, i]
    g[:, 0] = running
    return g


def ellipsoid_point(t, eta) -> np.ndarray:
    """Point y(t) on the positive orthant of the ellipsoid with axes eta^(-1/2).

    Satisfies sum_j eta_j y_j(t)^2 = 1; for uniform priors this is sqrt(N)
    times the unit-sphere point.
    """
    e = check_priors(eta)
    g = uniform_sphere_point(t, e.size)
    return g / np.sqrt(e)


def symmetric_point(n: int) -> np.ndarray:
    """Angles t0 at which all sphere coordinates equal N^(-1/2).

    Solves cos(t_k) = 1/sqrt(N - k + 1) recursively; for uniform priors the
    corresponding ellipsoid point has all coordinates equal to one.
    """
    if n < 2:
        raise DomainError("need at least two states")
    return np.array([np.arccos(1.0 / np.sqrt(n - i)) for i in range(n - 1)])
