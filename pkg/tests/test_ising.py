import math

import numpy as np
import pytest

from fairanneal import ising
from fairanneal.ising import (IsingProblem, MalformedProblemError, all_energies,
                              boltzmann_distribution, config_label, energy,
                              enumerate_ground_states, five_spin_ground_configs,
                              flip_config, gibbs_state, load_problem,
                              local_energy, local_energy_table, save_problem,
                              thermal_expectation)

from conftest import random_problem
import _oracles

SINGLE = IsingProblem(n=1, couplings=(), fields=(1.0,))
FERRO_PAIR = IsingProblem(n=2, couplings=((0, 1, 1.0),), fields=(0.0, 0.0))


def test_energy_single_spin_up():
    assert energy(SINGLE, 0b1) == -1.0
    assert energy(SINGLE, 0b0) == 1.0


def test_energy_ferro_pair_aligned():
    assert energy(FERRO_PAIR, 0b11) == -1.0
    assert energy(FERRO_PAIR, 0b00) == -1.0
    assert energy(FERRO_PAIR, 0b01) == 1.0


def test_energy_fixture_state_is_ground(five_spin):
    ground = enumerate_ground_states(five_spin)
    assert energy(five_spin, 0b00111) == ground.energy == -3.0


def test_energy_matches_independent_oracle(five_spin):
    for config in range(five_spin.dim):
        assert energy(five_spin, config) == pytest.approx(
            _oracles.energy_of(five_spin, config), abs=1e-12)


def test_all_energies_consistent(five_spin):
    vec = all_energies(five_spin)
    assert vec.shape == (32,)
    for config in (0, 7, 13, 31):
        assert vec[config] == pytest.approx(energy(five_spin, config), abs=1e-12)


def test_all_energies_chunked_evaluation_matches(monkeypatch, five_spin):
    whole = all_energies(five_spin)
    monkeypatch.setattr(ising, "_ENERGY_BLOCK_BITS", 2)
    np.testing.assert_array_equal(all_energies(five_spin), whole)


def test_local_energy_single_spin():
    assert local_energy(SINGLE, 0b1, 0) == -1.0


def test_local_energy_pair_antialigned():
    assert local_energy(FERRO_PAIR, 0b01, 0) == 1.0


def test_local_flip_identity_exhaustive_4_spins():
    rng = np.random.default_rng(7)
    prob = random_problem(rng, 4)
    for config in range(prob.dim):
        for i in range(prob.n):
            flipped = config ^ (1 << i)
            assert energy(prob, flipped) - energy(prob, config) == pytest.approx(
                -2.0 * local_energy(prob, config, i), abs=1e-12)


def test_local_flip_identity_vectorized_10_spins():
    rng = np.random.default_rng(11)
    prob = random_problem(rng, 10)
    energies = all_energies(prob)
    table = local_energy_table(prob)
    idx = np.arange(prob.dim)
    for i in range(prob.n):
        np.testing.assert_allclose(energies[idx ^ (1 << i)] - energies,
                                   -2.0 * table[i], atol=1e-10)


def test_enumerate_single_spin():
    ground = enumerate_ground_states(SINGLE)
    assert ground.configs == (1,)
    assert ground.energy == -1.0


def test_enumerate_ferro_pair_flip_symmetric():
    ground = enumerate_ground_states(FERRO_PAIR)
    assert ground.configs == (0, 3)
    assert ground.energy == -1.0


def test_enumerate_fixture_six_states(five_spin):
    ground = enumerate_ground_states(five_spin)
    assert ground.configs == five_spin_ground_configs()
    labels = {config_label(c, 5) for c in ground.configs}
    assert labels == {"+++++", "+++--", "++---", "-----", "---++", "--+++"}


def test_enumerate_no_nonmember_attains_minimum(five_spin):
    ground = enumerate_ground_states(five_spin)
    for config in range(five_spin.dim):
        if config not in ground:
            assert energy(five_spin, config) > ground.energy + 1e-9


def test_enumerate_size_guard():
    big = IsingProblem(n=25, couplings=(), fields=(0.0,) * 25)
    with pytest.raises(MalformedProblemError, match="n=25"):
        enumerate_ground_states(big)


def test_boltzmann_beta_zero_uniform(five_spin):
    np.testing.assert_allclose(boltzmann_distribution(five_spin, 0.0),
                               np.full(32, 1 / 32), atol=1e-15)


def test_boltzmann_single_spin_ratio():
    # two-state ratio exp(2 beta h) = 3 at beta = ln(3)/2
    dist = boltzmann_distribution(SINGLE, math.log(3.0) / 2.0)
    np.testing.assert_allclose(dist, [0.25, 0.75], atol=1e-14)


def test_boltzmann_fixture_matches_high_precision(five_spin):
    dist = boltzmann_distribution(five_spin, 2.0)
    oracle = np.array([float(x) for x in _oracles.mp_boltzmann(five_spin, 2.0)])
    np.testing.assert_allclose(dist, oracle, atol=1e-14)
    assert abs(dist.sum() - 1.0) <= 1e-12


def test_boltzmann_extreme_beta_no_overflow(five_spin):
    dist = boltzmann_distribution(five_spin, 1e3)
    assert np.isfinite(dist).all()
    assert abs(dist.sum() - 1.0) <= 1e-12
    # at beta = 1000 all weight is on the 6 ground states
    ground = enumerate_ground_states(five_spin)
    assert sum(dist[c] for c in ground.configs) == pytest.approx(1.0, abs=1e-15)


def test_boltzmann_negative_beta_rejected(five_spin):
    with pytest.raises(ValueError, match=">= 0"):
        boltzmann_distribution(five_spin, -0.5)


def test_thermal_expectation_normalization(five_spin):
    assert thermal_expectation(five_spin, 1.3, lambda _: 1.0) == pytest.approx(1.0)


def test_thermal_expectation_single_spin_magnetization():
    val = thermal_expectation(SINGLE, math.log(3.0) / 2.0,
                              lambda c: 1.0 if c & 1 else -1.0)
    assert val == pytest.approx(0.5, abs=1e-14)


def test_gibbs_beta_zero_uniform(five_spin):
    state = gibbs_state(five_spin, 0.0)
    np.testing.assert_allclose(state.amplitudes, np.full(32, 2 ** -2.5), atol=1e-15)


def test_gibbs_single_spin_amplitudes():
    # amplitude ratio exp(beta h) = 3 at beta = ln 3
    state = gibbs_state(SINGLE, math.log(3.0))
    np.testing.assert_allclose(state.amplitudes.real,
                               [math.sqrt(0.1), math.sqrt(0.9)], atol=1e-14)
    np.testing.assert_allclose(state.amplitudes.imag, 0.0, atol=0.0)


def test_gibbs_squared_equals_boltzmann_random():
    rng = np.random.default_rng(23)
    for _ in range(10):
        prob = random_problem(rng, int(rng.integers(1, 7)))
        beta = float(rng.uniform(0.0, 4.0))
        state = gibbs_state(prob, beta)
        assert abs(np.linalg.norm(state.amplitudes) - 1.0) <= 1e-12
        np.testing.assert_allclose(np.abs(state.amplitudes) ** 2,
                                   boltzmann_distribution(prob, beta), atol=1e-12)
        assert (state.amplitudes.real >= 0).all()


def test_flip_symmetry_zero_field():
    rng = np.random.default_rng(31)
    prob = random_problem(rng, 6)
    prob = IsingProblem(n=6, couplings=prob.couplings, fields=(0.0,) * 6)
    energies = all_energies(prob)
    for config in range(prob.dim):
        assert energies[config] == pytest.approx(
            energies[flip_config(config, 6)], abs=1e-12)
    ground = enumerate_ground_states(prob)
    assert all(flip_config(c, 6) in ground for c in ground.configs)


def test_problem_validation():
    with pytest.raises(MalformedProblemError):
        IsingProblem(n=2, couplings=((0, 2, 1.0),), fields=(0.0, 0.0))
    with pytest.raises(MalformedProblemError):
        IsingProblem(n=2, couplings=((1, 0, 1.0),), fields=(0.0, 0.0))
    with pytest.raises(MalformedProblemError):
        IsingProblem(n=2, couplings=((0, 1, 1.0), (0, 1, 2.0)), fields=(0.0, 0.0))
    with pytest.raises(MalformedProblemError):
        IsingProblem(n=2, couplings=(), fields=(0.0,))
    with pytest.raises(MalformedProblemError):
        energy(SINGLE, 5)
    with pytest.raises(MalformedProblemError):
        local_energy(SINGLE, 0, 3)


def test_problem_file_round_trip(tmp_path, five_spin):
    path = tmp_path / "prob.json"
    save_problem(five_spin, path)
    loaded = load_problem(path)
    assert loaded.n == five_spin.n
    assert loaded.couplings == five_spin.couplings
    assert loaded.fields == five_spin.fields


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(MalformedProblemError, match="not valid JSON"):
        load_problem(path)


def test_config_labels_and_flip():
    assert config_label(0b00111, 5) == "+++--"
    assert flip_config(0b00111, 5) == 0b11000
    assert config_label(0b11000, 5) == "---++"


def test_sectors_pair_by_flip(five_spin):
    ground = enumerate_ground_states(five_spin)
    sectors = ground.sectors(5)
    assert len(sectors) == 3
    for sec in sectors:
        assert len(sec) == 2
        assert sec[1] == flip_config(sec[0], 5)
        assert sec[0] & 1  # representative has sigma_0 = +1
