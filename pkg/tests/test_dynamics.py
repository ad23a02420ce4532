import numpy as np
import pytest

from fairanneal import dynamics, ising, sbo
from fairanneal.dynamics import (AccuracyError, IntegratorConfig,
                                 eigensolve_lowest, evolve, gap_profile,
                                 integrate_fixed, min_gap)
from fairanneal.hilbert import (DenseOperator, DiagonalOperator,
                                transverse_field_sum, uniform_superposition)
from fairanneal.ising import IsingProblem, gibbs_state
from fairanneal.sbo import Protocol, build_hs

from conftest import random_problem
import _oracles

FREE_SPIN = IsingProblem(n=1, couplings=(), fields=(0.0,))
PAIR = IsingProblem(n=2, couplings=((0, 1, 0.7),), fields=(0.3, -0.4))


def test_pure_transverse_field_preserves_plus_state():
    # H(t) is proportional to sigma_x throughout, so |+> only gains phase
    trace = evolve(Protocol(kind="qa", tau=np.pi), FREE_SPIN)
    overlap = abs(np.vdot(uniform_superposition(1).amplitudes,
                          trace.final_state.amplitudes))
    assert overlap == pytest.approx(1.0, abs=1e-6)


def test_static_diagonal_keeps_probabilities():
    energies = ising.all_energies(PAIR)
    psi = dynamics.evolve_static_diagonal(energies, 2, tau=7.0, steps=4000)
    probs = np.abs(psi) ** 2
    np.testing.assert_allclose(probs, np.full(4, 0.25), atol=1e-10)


def test_rk4_matches_product_exponential_oracle():
    trace = evolve(Protocol(kind="qa", tau=3.0), PAIR)
    reference = _oracles.propagate_product(PAIR, 3.0, 30000)
    assert np.linalg.norm(trace.final_state.amplitudes - reference) <= 1e-6


def test_rk4_matches_product_oracle_on_schedules(five_spin):
    # exercises time ordering plus the nonlinear temperature schedule
    for proto in (Protocol(kind="sbo", tau=20.0),
                  Protocol(kind="sboqa", tau=20.0, beta_target=1.5)):
        trace = evolve(proto, five_spin)
        reference = _oracles.propagate_product_protocol(five_spin, proto, 20000)
        assert np.linalg.norm(trace.final_state.amplitudes - reference) <= 1e-5


def test_integrator_is_fourth_order():
    proto = Protocol(kind="qa", tau=2.0)
    n_steps = 100
    ref_a = integrate_fixed(proto, PAIR, 100 * n_steps)
    ref_b = integrate_fixed(proto, PAIR, 200 * n_steps)
    err_a = np.linalg.norm(integrate_fixed(proto, PAIR, n_steps) - ref_a)
    err_b = np.linalg.norm(integrate_fixed(proto, PAIR, 2 * n_steps) - ref_b)
    assert 8.0 <= err_a / err_b <= 32.0


def test_norm_conservation_on_accepted_runs(five_spin):
    config = IntegratorConfig()
    for proto in (Protocol(kind="qa", tau=20.0),
                  Protocol(kind="sbo", tau=20.0),
                  Protocol(kind="sboqa", tau=20.0, beta_target=1.0)):
        trace = evolve(proto, five_spin, config)
        assert abs(trace.final_state.norm() - 1.0) <= config.norm_tol
        assert trace.norm_drift <= config.norm_tol
        assert trace.refinements >= 1
        assert trace.norm_drifts[-1] == trace.norm_drift


def test_evolution_is_deterministic(five_spin):
    proto = Protocol(kind="sbo", tau=15.0)
    a = evolve(proto, five_spin).final_state.amplitudes
    b = evolve(proto, five_spin).final_state.amplitudes
    np.testing.assert_array_equal(a, b)


def test_accuracy_error_carries_drift():
    config = IntegratorConfig(steps=100, steps_per_time=0.001, max_refinements=1)
    with pytest.raises(AccuracyError) as err:
        evolve(Protocol(kind="qa", tau=100.0), PAIR, config)
    assert err.value.norm_drift > 0.0


def test_snapshots_are_ordered_probabilities(five_spin):
    config = IntegratorConfig(snapshots=5)
    trace = evolve(Protocol(kind="qa", tau=5.0), five_spin, config)
    assert trace.times is not None and trace.snapshots is not None
    assert trace.times[0] == 0.0 and trace.times[-1] == pytest.approx(5.0)
    assert (np.diff(trace.times) > 0).all()
    # first snapshot is the uniform superposition
    np.testing.assert_allclose(trace.snapshots[0], np.full(32, 1 / 32), atol=1e-12)
    np.testing.assert_allclose(trace.snapshots.sum(axis=1), 1.0, atol=1e-6)


def test_matrix_free_apply_matches_dense(five_spin):
    rng = np.random.default_rng(9)
    psi = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    for proto in (Protocol(kind="qa", tau=4.0),
                  Protocol(kind="sbo", tau=4.0),
                  Protocol(kind="sboqa", tau=4.0, beta_target=2.0)):
        for t in (0.0, 1.3, 4.0):
            fast = dynamics.apply_protocol_hamiltonian(proto, five_spin, t, psi)
            dense = sbo.hamiltonian_at(proto, five_spin, t).matrix @ psi
            assert np.abs(fast - dense).max() <= 1e-12


def test_adiabatic_fidelity_ladder(five_spin):
    target = gibbs_state(five_spin, 1.0).amplitudes
    fidelities = []
    for tau in (30.0, 100.0, 300.0, 1000.0):
        trace = evolve(Protocol(kind="sboqa", tau=tau, beta_target=1.0), five_spin)
        fidelities.append(abs(np.vdot(target, trace.final_state.amplitudes)) ** 2)
    assert all(b >= a for a, b in zip(fidelities, fidelities[1:]))
    assert fidelities[-1] > 0.99


def test_eigensolve_transverse_field():
    H = (-1.0) * transverse_field_sum(3)
    sl = eigensolve_lowest(H, 2)
    assert sl.eigenvalues[0] == pytest.approx(-3.0, abs=1e-12)
    np.testing.assert_allclose(sl.ground_state, np.full(8, 8 ** -0.5), atol=1e-12)


def test_eigensolve_hs_zero_mode(five_spin):
    sl = eigensolve_lowest(build_hs(five_spin, 1.0), 2)
    assert abs(sl.eigenvalues[0]) <= 1e-9
    overlap = abs(sl.ground_state @ gibbs_state(five_spin, 1.0).amplitudes)
    assert overlap >= 1.0 - 1e-9


def test_eigensolve_diagonal_identity_vectors():
    H = DiagonalOperator(np.arange(1.0, 9.0)).to_dense()
    sl = eigensolve_lowest(H, 3)
    np.testing.assert_allclose(sl.eigenvalues, [1.0, 2.0, 3.0], atol=1e-12)
    np.testing.assert_allclose(sl.ground_state, np.eye(8)[0], atol=1e-12)


def test_eigensolve_rejects_nonsymmetric():
    bad = DenseOperator(np.array([[0.0, 1.0], [0.0, 0.0]]), hermitian=False)
    with pytest.raises(ValueError, match="symmetric"):
        eigensolve_lowest(bad, 1)


def test_gap_profile_qa_pair():
    prob = IsingProblem(n=2, couplings=((0, 1, 1.0),), fields=(0.1, 0.0))
    slices = gap_profile(Protocol(kind="qa", tau=1.0), prob, samples=21)
    assert len(slices) == 21
    assert slices[0].eigenvalues[1] - slices[0].eigenvalues[0] == pytest.approx(2.0, abs=1e-12)
    assert min_gap(slices) > 0.0
    assert [s.t for s in slices] == sorted(s.t for s in slices)


def test_gap_profile_sbo_start(five_spin):
    slices = gap_profile(Protocol(kind="sbo", tau=1.0), five_spin, samples=2)
    assert slices[0].eigenvalues[1] - slices[0].eigenvalues[0] == pytest.approx(2.0, abs=1e-10)


def test_gap_profile_sboqa_endpoint_matches_hs(five_spin):
    beta = 2.0
    slices = gap_profile(Protocol(kind="sboqa", tau=1.0, beta_target=beta),
                         five_spin, samples=3)
    end_gap = slices[-1].eigenvalues[1] - slices[-1].eigenvalues[0]
    hs_eigs = eigensolve_lowest(build_hs(five_spin, beta), 2).eigenvalues
    assert end_gap == pytest.approx(hs_eigs[1] - hs_eigs[0], abs=1e-12)


def test_gap_profile_requires_two_samples(five_spin):
    with pytest.raises(ValueError):
        gap_profile(Protocol(kind="qa", tau=1.0), five_spin, samples=1)


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(steps=50)
    with pytest.raises(ValueError):
        IntegratorConfig(norm_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(max_refinements=0)
    assert IntegratorConfig().initial_steps(1000.0) == 25000
