"""Central numerical tolerance record.

Every comparison threshold used by the package lives here so test suites can
tighten or loosen them uniformly by passing a custom instance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # linear algebra kernel
    hermiticity: float = 1e-10       # max |H - H^dag| accepted as Hermitian
    orthonormality: float = 1e-10    # unitarity of eigenvector / SVD factors
    reconstruction: float = 1e-9     # relative factorization residual
    psd_clamp: float = 1e-10         # eigenvalues in [-psd_clamp, 0) clamp to 0
    degeneracy: float = 1e-8         # relative eigenvalue-equality threshold
    max_condition: float = 1e12      # inversion refused above this condition
    inverse_residual: float = 1e-8   # max |M M^-1 - I|

    # state sets and priors
    unit_norm: float = 1e-10         # column normalization of state matrices
    min_singular: float = 1e-10      # linear-independence floor
    priors_sum: float = 1e-12        # |sum(eta) - 1|

    # analytic shortcuts
    coord_moduli: float = 1e-8       # equal-modulus eigenvector coordinate test
    circulant: float = 1e-8          # per-entry circulant Gram detection

    # optimality conditions
    chefles: float = 1e-7            # |max-eig(Xi X^2 Xi^dag) - 1| at an optimum
    duan_guo: float = 1e-8           # min-eig(Psi^dag Psi - X^2) >= -duan_guo

    # POVM construction
    completeness: float = 1e-10      # sum of detectors + complement vs identity
    unambiguity: float = 1e-9        # cross click probabilities
    povm_factor: float = 1e-9        # ancilla factorization residual
    rank: float = 1e-8               # eigenvalue threshold for numerical rank

    # Neumark extension
    unitarity: float = 1e-10
    block_equations: float = 1e-9
    inv_sqrt_floor: float = 1e-12    # eigenvalue floor inside inverse square roots

    def scaled(self, factor: float) -> "Tolerances":
        """Return a copy with every threshold multiplied by ``factor``
        (conditioning limits excluded)."""
        fields = {
            name: getattr(self, name) * factor
            for name in self.__dataclass_fields__
            if name != "max_condition"
        }
        return replace(self, **fields)


TOLS = Tolerances()
