import numpy as np
import pytest

from usdpovm import families


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (z + z.conj().T) / 2


def random_psd(n: int, rng: np.random.Generator, low: float = 0.0, high: float = 2.0) -> np.ndarray:
    u = random_unitary(n, rng)
    vals = rng.uniform(low, high, size=n)
    return (u * vals) @ u.conj().T


def feasible_weights(states, rng: np.random.Generator, fraction: float | None = None) -> np.ndarray:
    """Random feasible weight vector: a random direction on the sphere chart
    scaled to a fraction of its boundary radius (fraction 1 = PSD boundary)."""
    from usdpovm import mu_m_sq
    from usdpovm.geometry import HALF_PI, ellipsoid_point, uniform_priors

    n = states.matrix.shape[0] if hasattr(states, "matrix") else states.shape[0]
    t = rng.uniform(0.05, HALF_PI - 0.05, size=n - 1)
    eta = uniform_priors(n)
    f = rng.uniform(0.1, 1.0) if fraction is None else fraction
    scale = f / np.sqrt(mu_m_sq(states, eta, t))
    return scale * ellipsoid_point(t, eta)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture
def two_state_half():
    """The Hermitian two-state set at r=0.5 with its known optimum."""
    inst = families.gen(families.FamilySpec("two-state", 2, {"r": 0.5}))
    return inst.states, inst.known_pm


@pytest.fixture
def three_sub_example():
    """One-parameter n=3 family member with the documented numerical optimum."""
    inst = families.gen(families.FamilySpec("three-sub", 3, {"lam3": np.sqrt(1.5)}))
    return inst.states
