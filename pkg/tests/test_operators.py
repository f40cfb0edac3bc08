import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from precs.errors import ConfigError, ContractError, NumericError, SignatureError
from precs.operators import (
    DEFAULT_TOLERANCES,
    IDENTITY,
    KET_MINUS,
    KET_PLUS,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    anticommutator,
    check_density,
    commutator,
    dagger,
    dissipator,
    expm,
    hermiticity_residual,
    joint_n_max,
    partial_trace_env,
    projector,
    span_residual,
    spectral_floor,
    tensor,
    trace_deviation,
    unitarity_residual,
)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
complex2x2 = arrays(np.complex128, (2, 2), elements=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))


def test_pauli_algebra():
    assert np.allclose(SIGMA_X @ SIGMA_Y, 1j * SIGMA_Z)
    assert np.allclose(SIGMA_PLUS @ KET_MINUS, KET_PLUS)
    assert np.allclose(SIGMA_MINUS @ SIGMA_PLUS, projector(KET_MINUS))
    assert np.allclose(commutator(SIGMA_PLUS, SIGMA_MINUS), SIGMA_Z)


def test_constants_are_read_only():
    with pytest.raises(ValueError):
        SIGMA_Z[0, 0] = 2


def test_partial_trace_of_product():
    rho_q = projector(np.array([0.6, 0.8j]))
    env = np.diag([0.5, 0.3, 0.2]).astype(complex)
    M = tensor(rho_q, env)
    assert joint_n_max(M) == 3
    assert np.allclose(partial_trace_env(M), rho_q)


def test_joint_n_max_rejects_odd_dimension():
    with pytest.raises(SignatureError):
        joint_n_max(np.eye(5))


@given(complex2x2)
def test_commutator_identities(A):
    assert np.allclose(commutator(A, A), 0)
    assert np.allclose(anticommutator(A, IDENTITY), 2 * A)
    assert np.allclose(dagger(dagger(A)), A)


@given(complex2x2)
@settings(max_examples=50)
def test_expm_of_antihermitian_is_unitary(A):
    H = A + dagger(A)
    U = expm(H, -1j)
    assert unitarity_residual(U) < 1e-10


def test_expm_matches_pauli_rotation():
    t = 0.37
    U = expm(SIGMA_X, -1j * t)
    assert np.allclose(U, np.cos(t) * IDENTITY - 1j * np.sin(t) * SIGMA_X)


def test_expm_refuses_huge_norm():
    with pytest.raises(NumericError):
        expm(np.eye(2) * 1000.0)


@given(complex2x2, complex2x2)
@settings(max_examples=50)
def test_dissipator_is_traceless_and_hermitian(L, A):
    rho = A @ dagger(A)
    rho = rho / np.trace(rho) if abs(np.trace(rho)) > 1e-6 else projector(KET_PLUS)
    D = dissipator(L, rho)
    assert abs(np.trace(D)) < 1e-9 * max(1.0, np.abs(L).max() ** 2)
    assert hermiticity_residual(D) < 1e-9 * max(1.0, np.abs(L).max() ** 2)


def test_spectral_floor_and_density_checks():
    rho = projector(np.array([1, 1j]) / np.sqrt(2))
    assert abs(spectral_floor(rho)) < 1e-12
    assert trace_deviation(rho) < 1e-15
    check_density(rho)
    with pytest.raises(ContractError):
        spectral_floor(SIGMA_PLUS)


@given(finite, finite)
def test_span_residual_zero_on_span(c0, c1):
    assert span_residual(c0 * IDENTITY + 1j * c1 * SIGMA_Z) < 1e-12


def test_span_residual_detects_off_diagonal():
    assert span_residual(SIGMA_X) == pytest.approx(1.0)


def test_tolerance_overrides():
    t = DEFAULT_TOLERANCES.updated({"norm": 1e-3})
    assert t.norm == 1e-3 and t.herm == DEFAULT_TOLERANCES.herm
    with pytest.raises(ConfigError):
        DEFAULT_TOLERANCES.updated({"nope": 1.0})
