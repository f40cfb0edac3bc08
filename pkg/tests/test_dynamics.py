import csv
import logging

import numpy as np
import pytest

from precs.bosonic import FockSpace, coherent_vector, make_grid
from precs.dynamics import (
    TRAJECTORY_COLUMNS,
    Branch,
    Channel,
    coefficient_b,
    evolve_decoupled_markov,
    evolve_exact,
    evolve_gksl,
    flowing_channel,
    hamilton_flow,
    reduced_coherence,
    write_trajectory_csv,
)
from precs.errors import ConfigError, ContractError
from precs.models import PureDephasingModel
from precs.operators import KET_MINUS, KET_PLUS, SIGMA_MINUS, SIGMA_X, SIGMA_Z, projector
from precs.parametric import JointState, decompose, random_joint_state

KET_X = np.array([1, 1]) / np.sqrt(2)


def test_free_oscillator_follows_hamilton_flow():
    m = PureDephasingModel(1.3, 0.0)
    n = 30
    psi0 = JointState.coherent_product(KET_PLUS, 0.8 + 0.3j, n)
    times = np.linspace(0, 3, 7)
    traj = evolve_exact(m.hamiltonian(n), psi0, times)
    for t, s in zip(times, traj.states):
        target = coherent_vector(FockSpace(n), hamilton_flow(1.3, 0.8 + 0.3j, t))
        assert abs(abs(np.vdot(target, s.amplitudes[0])) - 1) < 1e-9


def test_exact_evolution_preserves_norm(rng):
    psi0 = random_joint_state(20, rng)
    traj = evolve_exact(PureDephasingModel(1.0, 0.5).hamiltonian(20), psi0, np.linspace(0.5, 5, 10))
    assert max(abs(s.norm - 1) for s in traj.states) < 1e-12
    assert np.max(traj.diagnostics()["trace_dev"]) < 1e-12


def test_exact_rejects_non_hermitian(rng):
    H = np.zeros((8, 8), complex)
    H[0, 1] = 1
    with pytest.raises(ContractError):
        evolve_exact(H, random_joint_state(4, rng), [1.0])


def test_times_must_increase(rng):
    with pytest.raises(ConfigError):
        evolve_exact(np.eye(8), random_joint_state(4, rng), [1.0, 0.5])


def test_constant_dephasing_closed_form():
    gamma = 0.3
    times = np.linspace(0, 2, 11)
    traj = evolve_gksl(0.7 * SIGMA_Z, [(gamma, SIGMA_Z)], projector(KET_X), times, dt=1e-2)
    expected = 0.5 * np.exp(-2j * 0.7 * times - 2 * gamma * times)
    assert np.max(np.abs(reduced_coherence(traj) - expected)) < 1e-9


def test_decay_channel():
    times = np.linspace(0, 3, 7)
    traj = evolve_gksl(np.zeros((2, 2)), [Channel(1.0, SIGMA_MINUS)], projector(KET_PLUS), times, dt=1e-2)
    assert np.allclose(traj.densities()[:, 0, 0].real, np.exp(-times), atol=1e-9)


def test_negative_rate_is_refused():
    with pytest.raises(ContractError):
        evolve_gksl(np.zeros((2, 2)), [(lambda t: 1.0 - t, SIGMA_Z)], projector(KET_X), [0.5, 2.0], dt=0.1)


def test_positivity_breach_is_reported(caplog):
    with caplog.at_level(logging.WARNING):
        traj = evolve_gksl(np.zeros((2, 2)), [(100.0, SIGMA_MINUS)], projector(KET_PLUS), [0.5], dt=0.1)
    assert traj.warnings and "positivity" in caplog.text


def test_decoupled_reduces_to_gksl_for_shared_channels():
    times = np.linspace(0, 2, 5)
    H = 0.2 * SIGMA_X
    jumps = [Channel(lambda t: 0.1 * (1 + np.sin(t)), SIGMA_Z)]
    ref = evolve_gksl(H, jumps, 0.3 * projector(KET_PLUS) + 0.7 * projector(KET_MINUS), times, dt=1e-2)
    dec = evolve_decoupled_markov(H, [Branch(0.3, KET_PLUS, jumps), Branch(0.7, KET_MINUS, jumps)], times, dt=1e-2)
    assert np.max(np.abs(ref.densities() - dec.densities())) < 1e-12


def test_decoupled_with_flowing_labels():
    flow = lambda t: hamilton_flow(1.0, 0.5, t)
    ch = flowing_channel(flow, lambda a: SIGMA_Z * np.exp(1j * np.angle(a)), lambda a: abs(a) ** 2)
    traj = evolve_decoupled_markov(np.zeros((2, 2)), [Branch(1.0, KET_X, [ch])], [1.0], dt=1e-2)
    # |alpha(t)|^2 stays 0.25 and the phase does not matter for sigma_z dephasing
    assert abs(reduced_coherence(traj)[0] - 0.5 * np.exp(-0.5)) < 1e-9


def test_branch_validation():
    with pytest.raises(ConfigError):
        evolve_decoupled_markov(np.zeros((2, 2)), [Branch(0.5, KET_PLUS, [])], [1.0])
    with pytest.raises(ConfigError):
        evolve_decoupled_markov(np.zeros((2, 2)), [Branch(1.0, 0.5 * np.eye(2), [])], [1.0])


def test_coefficient_b_is_time_derivative_of_amplitudes(rng):
    m = PureDephasingModel(1.0, 0.4)
    n = 16
    H = m.hamiltonian(n)
    psi = random_joint_state(n, rng)
    grid = make_grid(7.0, 0.25)
    eps = 1e-5
    U = evolve_exact(H, psi, [eps]).states[0]
    V = evolve_exact(-H, psi, [eps]).states[0]
    fd = (decompose(U, grid).a - decompose(V, grid).a) / (2 * eps)
    assert np.max(np.abs(coefficient_b(H, psi, grid) - fd)) < 1e-7
    j = grid.index_of(0.5)
    assert np.allclose(coefficient_b(H, psi, grid, j), coefficient_b(H, psi, grid)[j])


def test_trajectory_csv(tmp_path):
    traj = evolve_gksl(np.zeros((2, 2)), [(0.1, SIGMA_Z)], projector(KET_X), [0.0, 1.0], dt=0.1)
    path = tmp_path / "t.csv"
    write_trajectory_csv(traj, path)
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == TRAJECTORY_COLUMNS and len(rows) == 3
