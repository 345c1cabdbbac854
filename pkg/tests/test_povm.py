import numpy as np
import pytest

from usdpovm import families, linalg, optimizer, povm
from usdpovm.errors import DomainError, InfeasibleWeightsError, RankDeficientError
from usdpovm.families import FamilySpec, gen

from conftest import feasible_weights, random_unitary


class TestDetectionOperators:
    def test_orthonormal_states(self):
        dets = povm.detection_operators(np.eye(3), np.ones(3))
        for j, d in enumerate(dets):
            expected = np.zeros((3, 3))
            expected[j, j] = 1.0
            assert np.abs(d - expected).max() < 1e-14

    def test_two_state_optimum_diagonal(self, two_state_half):
        states, known = two_state_half
        res = optimizer.optimize(states)
        dets = povm.detection_operators(states, res.weights)
        m = states.matrix
        for j in range(2):
            p = (m[:, j].conj() @ dets[j] @ m[:, j]).real
            assert abs(p - known) < 1e-10

    def test_click_probabilities_are_squared_weights(self, rng):
        psi = families.random_states(3, 3)
        x = feasible_weights(psi, rng)
        dets = povm.detection_operators(psi, x)
        m = psi.matrix
        for j in range(3):
            for k in range(3):
                p = (m[:, j].conj() @ dets[k] @ m[:, j]).real
                target = x[j] ** 2 if j == k else 0.0
                assert abs(p - target) < 1e-9

    def test_infeasible_raises(self, two_state_half):
        states, _ = two_state_half
        res = optimizer.optimize(states)
        with pytest.raises(InfeasibleWeightsError):
            povm.detection_operators(states, 1.2 * res.weights)


class TestComplement:
    def test_zero_weights(self):
        pset = povm.complement(np.eye(3), np.zeros(3))
        assert np.abs(pset.complement - np.eye(3)).max() < 1e-14
        assert pset.ancilla_dim == 3
        assert np.abs(pset.ancilla_vectors @ pset.ancilla_vectors.conj().T
                      - np.eye(3)).max() < 1e-12

    def test_equal_overlap_positive_s(self):
        inst = gen(FamilySpec("equal-overlap", 4, {"s": 0.3}))
        res = optimizer.optimize(inst.states)
        pset = povm.complement(inst.states, res.weights)
        assert pset.ancilla_dim == 1

    def test_equal_overlap_negative_s(self):
        inst = gen(FamilySpec("equal-overlap", 4, {"s": -0.2}))
        res = optimizer.optimize(inst.states)
        pset = povm.complement(inst.states, res.weights)
        assert pset.ancilla_dim == 3

    def test_invariants_random(self, rng):
        for trial in range(100):
            n = int(rng.integers(2, 7))
            psi = families.random_states(n, 300 + trial)
            x = feasible_weights(psi, rng)
            pset = povm.complement(psi, x)
            total = sum(pset.detectors) + pset.complement
            assert np.abs(total - np.eye(n)).max() <= 1e-10
            assert linalg.herm_eig(pset.complement).eigenvalues[0] >= -1e-10
            assert np.abs(pset.ancilla_vectors @ pset.ancilla_vectors.conj().T
                          - pset.complement).max() <= 1e-9
            assert pset.ancilla_vectors.shape[1] == pset.ancilla_dim

    def test_ancilla_dim_matches_top_degeneracy_at_optimum(self):
        # at an optimum the number of unit eigenvalues of Xi_x Xi_x^dag
        # determines the missing rank of the complement
        inst = gen(FamilySpec("equal-overlap", 5, {"s": 0.4}))
        res = optimizer.optimize(inst.states)
        xi_x = povm.scaled_reciprocals(inst.states, res.weights)
        w = linalg.herm_eig(xi_x @ xi_x.conj().T).eigenvalues
        n_unit = int(np.sum(np.abs(w - 1.0) < 1e-8))
        pset = povm.complement(inst.states, res.weights)
        assert pset.ancilla_dim == 5 - n_unit == 1


class TestAncillaFull:
    def test_diagonal_case(self):
        out = povm.ancilla_full(np.eye(2), np.array([0.5, 0.5]))
        assert np.abs(out - np.sqrt(0.75) * np.eye(2)).max() < 1e-12

    def test_shrunk_optimum_has_full_rank(self, three_sub_example):
        res = optimizer.optimize(three_sub_example)
        x = povm.shrink_weights(res.weights, 0.999)
        out = povm.ancilla_full(three_sub_example, x)
        assert out.shape == (3, 3)
        assert np.linalg.matrix_rank(out) == 3

    def test_boundary_raises(self, three_sub_example):
        res = optimizer.optimize(three_sub_example)
        with pytest.raises(RankDeficientError):
            povm.ancilla_full(three_sub_example, res.weights)

    def test_completion_property(self, rng):
        for trial in range(50):
            n = int(rng.integers(2, 7))
            psi = families.random_states(n, 600 + trial)
            x = feasible_weights(psi, rng, fraction=float(rng.uniform(0.2, 0.9)))
            out = povm.ancilla_full(psi, x)
            xi_x = povm.scaled_reciprocals(psi, x)
            total = out @ out.conj().T + xi_x @ xi_x.conj().T
            assert np.abs(total - np.eye(n)).max() <= 1e-9


class TestAncillaReduced:
    def test_orthonormal_full_weights(self):
        out = povm.ancilla_reduced(np.eye(3), np.ones(3))
        assert out.shape == (3, 0)

    def test_equal_overlap_single_column(self):
        inst = gen(FamilySpec("equal-overlap", 4, {"s": 0.3}))
        res = optimizer.optimize(inst.states)
        out = povm.ancilla_reduced(inst.states, res.weights)
        assert out.shape == (4, 1)

    def test_symmetric_optimum_columns(self):
        c = np.array([0.75, 0.35, np.sqrt(1 - 0.75**2 - 0.35**2)])
        inst = gen(FamilySpec("symmetric", 3, {"c": c.tolist()}))
        res = optimizer.optimize(inst.states)
        out = povm.ancilla_reduced(inst.states, res.weights)
        assert out.shape == (3, 2)  # simple top eigenvalue -> n-1 columns

    def test_unitary_freedom_preserves_complement(self, rng):
        psi = families.random_states(4, 12)
        x = feasible_weights(psi, rng, fraction=0.7)
        base = povm.ancilla_reduced(psi, x)
        n_a = base.shape[1]
        v = random_unitary(n_a, rng)
        rotated = povm.ancilla_reduced(psi, x, v)
        assert np.abs(rotated @ rotated.conj().T - base @ base.conj().T).max() <= 1e-10

    def test_rejects_bad_rotation(self, rng):
        psi = families.random_states(3, 13)
        x = feasible_weights(psi, rng, fraction=0.5)
        n_a = povm.ancilla_reduced(psi, x).shape[1]
        with pytest.raises(DomainError):
            povm.ancilla_reduced(psi, x, np.ones((n_a, n_a)))


class TestShrink:
    def test_range(self):
        with pytest.raises(DomainError):
            povm.shrink_weights(np.ones(2), 1.0)
        with pytest.raises(DomainError):
            povm.shrink_weights(np.ones(2), 0.0)

    def test_scales(self):
        out = povm.shrink_weights(np.array([1.0, 2.0]), 0.5)
        assert np.allclose(out, [0.5, 1.0])
