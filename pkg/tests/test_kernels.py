import numpy as np
import pytest

from usdpovm import _kernels


def _reference_direct(xi, ysq):
    return np.linalg.eigvalsh((xi[None, :, :] * ysq[:, None, :]) @ xi.conj().T)[:, -1]


def test_reference_matches_direct():
    rng = np.random.default_rng(10)
    for n in (2, 3, 4, 6, 8):
        xi = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        ysq = rng.uniform(0.0, 1.5, size=(257, n))
        ref = _kernels.get_backend("reference").top_eigenvalues(xi, ysq)
        assert np.abs(ref - _reference_direct(xi, ysq)).max() < 1e-12


@pytest.mark.skipif("native" not in _kernels.available_backends(),
                    reason="compiled kernel not built")
def test_backends_agree():
    rng = np.random.default_rng(11)
    native = _kernels.get_backend("native")
    reference = _kernels.get_backend("reference")
    for n in range(2, 9):
        xi = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        ysq = rng.uniform(0.0, 2.0, size=(503, n))
        a = native.top_eigenvalues(xi, ysq)
        b = reference.top_eigenvalues(xi, ysq)
        assert np.abs(a - b).max() < 1e-11


@pytest.mark.skipif("native" not in _kernels.available_backends(),
                    reason="compiled kernel not built")
def test_native_rejects_large_n():
    native = _kernels.get_backend("native")
    xi = np.eye(17, dtype=complex)
    with pytest.raises(ValueError):
        native.top_eigenvalues(xi, np.ones((1, 17)))


def test_single_point_wrapper():
    rng = np.random.default_rng(12)
    xi = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    y = rng.uniform(0.1, 1.0, size=3)
    single = _kernels.top_eigenvalue(np.ascontiguousarray(xi), y)
    batch = _kernels.top_eigenvalues(np.ascontiguousarray(xi), y[None, :])[0]
    assert single == batch


def test_selection_reports_name():
    assert _kernels.backend_name() in ("native", "reference")
    assert "reference" in _kernels.available_backends()
