import numpy as np
import pytest

from usdpovm import families, neumark, optimizer, povm, simulator
from usdpovm.errors import DimensionMismatchError, NotCompletionError, RankDeficientError
from usdpovm.families import FamilySpec, gen

from conftest import random_unitary


def random_completion(n, n_a, rng):
    """Random (Xi, Xi~) pair with exact completeness and ancilla rank n_a."""
    u = random_unitary(n, rng)
    s = np.empty(n)
    s[: n - n_a] = 1.0
    s[n - n_a:] = rng.uniform(0.05, 0.95, size=n_a)
    pi = (u * s) @ u.conj().T
    pi = (pi + pi.conj().T) / 2
    root = (u * np.sqrt(s)) @ u.conj().T
    xi = root @ random_unitary(n, rng)
    keep = np.flatnonzero(1.0 - s > 1e-12)
    xi_tilde = u[:, keep] * np.sqrt(1.0 - s[keep])
    return xi, xi_tilde


class TestExtend:
    def test_block_rotation(self):
        theta = 0.7
        ext = neumark.extend(np.cos(theta) * np.eye(3), np.sin(theta) * np.eye(3))
        assert np.abs(ext.u.conj().T @ ext.u - np.eye(6)).max() < 1e-12

    def test_two_state_optimum_single_ancilla(self, two_state_half):
        states, _ = two_state_half
        res = optimizer.optimize(states)
        pset = povm.complement(states, res.weights)
        assert pset.ancilla_dim == 1
        xi_x = povm.scaled_reciprocals(states, res.weights)
        ext = neumark.extend(xi_x, pset.ancilla_vectors)
        assert ext.u.shape == (3, 3)
        assert np.abs(ext.u.conj().T @ ext.u - np.eye(3)).max() <= 1e-10

    def test_top_blocks_are_inputs(self, rng):
        xi, xi_tilde = random_completion(4, 2, rng)
        ext = neumark.extend(xi, xi_tilde)
        assert np.array_equal(ext.u[:4, :4], xi)
        assert np.array_equal(ext.u[:4, 4:], xi_tilde)

    def test_random_completions_block_equations(self, rng):
        for trial in range(120):
            n = int(rng.integers(2, 7))
            n_a = int(rng.integers(1, n + 1))
            xi, xi_tilde = random_completion(n, n_a, rng)
            ext = neumark.extend(xi, xi_tilde)
            resid = neumark.block_residuals(ext)
            assert resid["unitarity"] <= 1e-10
            assert resid["columns_first"] <= 1e-9
            assert resid["columns_last"] <= 1e-9
            assert resid["cross"] <= 1e-9

    def test_rotation_changes_only_bottom_blocks(self, rng):
        xi, xi_tilde = random_completion(3, 2, rng)
        v = random_unitary(2, rng)
        base = neumark.extend(xi, xi_tilde)
        rot = neumark.extend(xi, xi_tilde, v)
        assert np.abs(rot.u[:3] - base.u[:3]).max() < 1e-15
        assert np.abs(rot.z - v @ base.z).max() < 1e-12
        assert np.abs(rot.y - v @ base.y).max() < 1e-12

    def test_rejects_incomplete_pair(self, rng):
        xi, xi_tilde = random_completion(3, 2, rng)
        with pytest.raises(NotCompletionError):
            neumark.extend(0.9 * xi, xi_tilde)

    def test_rejects_dependent_ancilla(self, rng):
        xi, xi_tilde = random_completion(3, 2, rng)
        bad = np.column_stack([xi_tilde[:, 0], xi_tilde[:, 0]])
        with pytest.raises((RankDeficientError, NotCompletionError)):
            neumark.extend(xi, bad)

    def test_zero_weight_column_still_extends(self):
        # a dead detector (zero weight) routes its column through the ancilla
        # rows; the polar-factor construction keeps the completion unitary
        xi = np.diag([1.0, 0.0]).astype(complex)
        xi_tilde = np.array([[0.0], [1.0]], dtype=complex)
        ext = neumark.extend(xi, xi_tilde)
        assert np.abs(ext.u.conj().T @ ext.u - np.eye(3)).max() < 1e-12

    def test_zero_weights_everywhere(self):
        # the all-zero detector matrix completes to a pure ancilla rotation
        ext = neumark.extend(np.zeros((2, 2), dtype=complex), np.eye(2, dtype=complex))
        assert np.abs(ext.u.conj().T @ ext.u - np.eye(4)).max() < 1e-12


class TestExtendTensor:
    def test_hadamard_like(self):
        ext = neumark.extend_tensor(np.eye(2) / np.sqrt(2), np.eye(2) / np.sqrt(2))
        assert ext.tensor_form
        assert np.abs(ext.u.conj().T @ ext.u - np.eye(4)).max() < 1e-12

    def test_diagonal_blocks(self):
        ext = neumark.extend_tensor(0.6 * np.eye(2), 0.8 * np.eye(2))
        assert np.abs(ext.u[2:, :2] - 0.8 * np.eye(2)).max() < 1e-15
        assert np.abs(ext.u[2:, 2:] + 0.6 * np.eye(2)).max() < 1e-15

    def test_shrunk_three_sub_is_6x6(self, three_sub_example):
        res = optimizer.optimize(three_sub_example)
        x = povm.shrink_weights(res.weights, 0.999)
        xi_x = povm.scaled_reciprocals(three_sub_example, x)
        xi_tilde = povm.ancilla_full(three_sub_example, x)
        ext = neumark.extend_tensor(xi_x, xi_tilde)
        assert ext.u.shape == (6, 6)
        assert np.abs(ext.u.conj().T @ ext.u - np.eye(6)).max() <= 1e-10

    def test_shrunk_four_param_is_8x8(self):
        lam = np.sqrt([1.6, 0.9, 1.2, 0.3])
        inst = gen(FamilySpec("four-param", 4, dict(
            lam1=lam[0], lam2=lam[1], lam3=lam[2], lam4=lam[3])))
        res = optimizer.optimize(inst.states)
        x = povm.shrink_weights(res.weights, 0.995)
        xi_x = povm.scaled_reciprocals(inst.states, x)
        xi_tilde = povm.ancilla_full(inst.states, x)
        ext = neumark.extend_tensor(xi_x, xi_tilde)
        assert ext.u.shape == (8, 8)
        assert np.abs(ext.u.conj().T @ ext.u - np.eye(8)).max() <= 1e-10

    def test_matches_extend_with_polar_rotation(self, rng):
        # choosing v as the polar unitary of Xi collapses the bottom blocks
        # to (Xi~, -Xi)
        for trial in range(25):
            n = int(rng.integers(2, 6))
            psi = families.random_states(n, 900 + trial)
            from conftest import feasible_weights

            x = feasible_weights(psi, rng, fraction=0.8)
            xi_x = povm.scaled_reciprocals(psi, x)
            xi_tilde = povm.ancilla_full(psi, x)
            tensor = neumark.extend_tensor(xi_x, xi_tilde)
            via_v = neumark.extend(xi_x, xi_tilde, v=neumark.polar_unitary(xi_x))
            assert np.abs(tensor.u - via_v.u).max() <= 1e-9

    def test_rejects_rectangular(self, rng):
        xi, xi_tilde = random_completion(3, 2, rng)
        with pytest.raises(DimensionMismatchError):
            neumark.extend_tensor(xi, xi_tilde)


class TestProjectStatistics:
    def test_orthonormal_identity_table(self):
        # full-strength orthonormal measurement: unit weights, empty ancilla
        res = optimizer.optimize(np.eye(3))
        pset = povm.complement(np.eye(3), res.weights)
        assert pset.ancilla_dim == 0
        table = simulator.born_table(np.eye(3), pset)
        assert np.abs(table[:, :3] - np.eye(3)).max() < 1e-12

    def test_two_state_optimum(self, two_state_half):
        states, known = two_state_half
        res = optimizer.optimize(states)
        pset = povm.complement(states, res.weights)
        xi_x = povm.scaled_reciprocals(states, res.weights)
        ext = neumark.extend(xi_x, pset.ancilla_vectors)
        table = neumark.project_statistics(ext, states)
        assert np.abs(np.diag(table[:, :2]) - known).max() < 1e-10
        assert np.abs(table[:, :2] - np.diag(np.diag(table[:, :2]))).max() < 1e-9

    def test_equal_overlap_inconclusive_rate(self):
        inst = gen(FamilySpec("equal-overlap", 3, {"s": 0.3}))
        res = optimizer.optimize(inst.states)
        pset = povm.complement(inst.states, res.weights)
        xi_x = povm.scaled_reciprocals(inst.states, res.weights)
        ext = neumark.extend(xi_x, pset.ancilla_vectors)
        table = neumark.project_statistics(ext, inst.states)
        inconclusive = table[:, 3:].sum(axis=1)
        assert np.abs(inconclusive - 0.3).max() < 1e-10

    def test_matches_born_table(self, rng):
        from conftest import feasible_weights

        for trial in range(40):
            n = int(rng.integers(2, 7))
            psi = families.random_states(n, 700 + trial)
            x = feasible_weights(psi, rng, fraction=float(rng.uniform(0.3, 0.95)))
            pset = povm.complement(psi, x)
            xi_x = povm.scaled_reciprocals(psi, x)
            ext = neumark.extend(xi_x, pset.ancilla_vectors)
            table = neumark.project_statistics(ext, psi)
            born = simulator.born_table(psi, pset)
            assert np.abs(table[:, :n] - born[:, :n]).max() <= 1e-9
            assert np.abs(table[:, n:].sum(axis=1) - born[:, n]).max() <= 1e-9
            assert np.abs(table.sum(axis=1) - 1.0).max() <= 1e-10
