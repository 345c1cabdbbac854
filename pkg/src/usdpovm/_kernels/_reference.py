"""Pure-numpy fallback for the hot eigenvalue kernel."""

from __future__ import annotations

import numpy as np

NAME = "reference"

# keep peak memory of the stacked (m, n, n) temporaries bounded
_CHUNK = 1 << 16


def top_eigenvalues(xi: np.ndarray, ysq: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of Xi diag(ysq[p]) Xi^dagger for every row p.

    ``xi`` is (n, n) complex, ``ysq`` is (m, n) real nonnegative; returns (m,).
    """
    xi = np.asarray(xi, dtype=complex)
    ysq = np.atleast_2d(np.asarray(ysq, dtype=float))
    xid = xi.conj().T
    out = np.empty(ysq.shape[0])
    for lo in range(0, ysq.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, ysq.shape[0])
        stacked = (xi[None, :, :] * ysq[lo:hi, None, :]) @ xid
        out[lo:hi] = np.linalg.eigvalsh(stacked)[:, -1]
    return out
