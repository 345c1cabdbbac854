import numpy as np
import pytest

from usdpovm import families, optimizer, povm, simulator
from usdpovm.errors import DomainError
from usdpovm.families import FamilySpec, gen

from conftest import feasible_weights


def optimal_povm(states):
    res = optimizer.optimize(states)
    return povm.complement(states, res.weights), res


class TestBornTable:
    def test_orthonormal(self):
        pset, _ = optimal_povm(families.StateSet(np.eye(3)))
        table = simulator.born_table(np.eye(3), pset)
        assert np.abs(table[:, :3] - np.eye(3)).max() < 1e-12
        assert np.abs(table[:, 3]).max() < 1e-12

    def test_two_state_optimum(self, two_state_half):
        states, known = two_state_half
        pset, _ = optimal_povm(states)
        table = simulator.born_table(states, pset)
        assert np.abs(np.diag(table[:, :2]) - known).max() < 1e-10

    def test_rows_sum_to_one_and_unambiguous(self, rng):
        for trial in range(30):
            n = int(rng.integers(2, 6))
            psi = families.random_states(n, 400 + trial)
            x = feasible_weights(psi, rng)
            pset = povm.complement(psi, x)
            table = simulator.born_table(psi, pset)
            assert np.abs(table.sum(axis=1) - 1.0).max() <= 1e-10
            off = table[:, :n] - np.diag(np.diag(table[:, :n]))
            assert np.abs(off).max() <= 1e-9
            assert np.abs(np.diag(table[:, :n]) - x**2).max() <= 1e-9


class TestSimulate:
    def test_orthonormal_always_succeeds(self):
        pset, _ = optimal_povm(families.StateSet(np.eye(2)))
        report = simulator.simulate(np.eye(2), [0.5, 0.5], pset, 5000, seed=1)
        assert report.success_rate == 1.0
        assert report.error_rate == 0.0

    def test_deterministic(self, two_state_half):
        states, _ = two_state_half
        pset, _ = optimal_povm(states)
        a = simulator.simulate(states, [0.5, 0.5], pset, 20000, seed=42)
        b = simulator.simulate(states, [0.5, 0.5], pset, 20000, seed=42)
        assert a.success_rate == b.success_rate
        assert np.array_equal(a.per_state, b.per_state)

    def test_seed_changes_stream(self, two_state_half):
        states, _ = two_state_half
        pset, _ = optimal_povm(states)
        a = simulator.simulate(states, [0.5, 0.5], pset, 20000, seed=42)
        b = simulator.simulate(states, [0.5, 0.5], pset, 20000, seed=43)
        assert not np.array_equal(a.per_state, b.per_state)

    def test_statistics_within_five_sigma(self, two_state_half):
        states, known = two_state_half
        pset, res = optimal_povm(states)
        report = simulator.simulate(states, [0.5, 0.5], pset, 200000, seed=7)
        assert report.theoretical_pm == pytest.approx(known, abs=1e-10)
        assert abs(report.z_score) < 5.0
        assert report.error_rate == 0.0
        assert abs(report.success_rate + report.inconclusive_rate
                   + report.error_rate - 1.0) < 1e-12

    def test_worker_partition_deterministic(self, two_state_half):
        states, _ = two_state_half
        pset, _ = optimal_povm(states)
        a = simulator.simulate(states, [0.5, 0.5], pset, 30001, seed=5, workers=4)
        b = simulator.simulate(states, [0.5, 0.5], pset, 30001, seed=5, workers=4)
        assert np.array_equal(a.per_state, b.per_state)
        assert a.per_state.sum() == 30001
        assert a.workers == 4

    def test_convergence_with_more_trials(self, two_state_half):
        # doubling the trial count shrinks the mean absolute deviation
        states, known = two_state_half
        pset, _ = optimal_povm(states)
        eta = [0.5, 0.5]
        devs_small, devs_big = [], []
        for seed in range(50):
            small = simulator.simulate(states, eta, pset, 2000, seed=seed)
            big = simulator.simulate(states, eta, pset, 8000, seed=seed + 1000)
            devs_small.append(abs(small.success_rate - small.theoretical_pm))
            devs_big.append(abs(big.success_rate - big.theoretical_pm))
            assert abs(small.z_score) < 5.0
            assert abs(big.z_score) < 5.0
        assert np.mean(devs_big) < np.mean(devs_small)

    def test_prior_weighting(self):
        # success probability mixes per-state efficiencies by the priors
        psi = gen(FamilySpec("two-state", 2, {"r": 0.45})).states
        eta = [0.8, 0.2]
        res = optimizer.optimize(psi, eta)
        pset = povm.complement(psi, res.weights)
        report = simulator.simulate(psi, eta, pset, 400000, seed=11)
        assert report.theoretical_pm == pytest.approx(res.p_m, abs=1e-12)
        assert abs(report.success_rate - res.p_m) < 5 * np.sqrt(res.p_m / 400000)

    def test_rejects_bad_counts(self, two_state_half):
        states, _ = two_state_half
        pset, _ = optimal_povm(states)
        with pytest.raises(DomainError):
            simulator.simulate(states, [0.5, 0.5], pset, 0, seed=1)
        with pytest.raises(DomainError):
            simulator.simulate(states, [0.5, 0.5], pset, 10, seed=1, workers=0)
