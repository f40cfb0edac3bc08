import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import factorial

from precs.bosonic import (
    FockSpace,
    coherent_kernel,
    coherent_vector,
    displacement,
    fock_amplitudes,
    identity_resolution_error,
    make_grid,
    overlap,
    truncation_tail,
)
from precs.errors import ConfigError, TruncationError

labels = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


def test_ladder_operators():
    fs = FockSpace(6)
    assert np.allclose(fs.adag @ fs.a, fs.number)
    # [a, a^dag] = 1 except in the last level of the truncation
    C = fs.a @ fs.adag - fs.adag @ fs.a
    assert np.allclose(np.diag(C)[:-1], 1.0)
    assert fs.faithful_block == 3


@given(labels)
def test_fock_amplitudes_match_factorial_formula(alpha):
    n = np.arange(20)
    expected = np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.sqrt(factorial(n))
    assert np.allclose(fock_amplitudes(alpha, 20), expected, atol=1e-14)


@given(labels, labels)
@settings(max_examples=50)
def test_overlap_closed_form_matches_vectors(alpha, beta):
    fs = FockSpace(40)
    v = np.vdot(coherent_vector(fs, beta), coherent_vector(fs, alpha))
    assert abs(v - overlap(beta, alpha)) < 1e-10


@given(labels)
@settings(max_examples=25, deadline=None)
def test_displacement_of_vacuum_is_coherent(alpha):
    fs = FockSpace(40)
    D = displacement(fs, alpha)
    v = D @ fs.basis(0)
    k = fs.faithful_block
    assert np.max(np.abs(v[:k] - coherent_vector(fs, alpha)[:k])) < 1e-8


def test_truncation_guard():
    assert truncation_tail(0.0, 5) == 0.0
    with pytest.raises(TruncationError) as err:
        coherent_vector(FockSpace(10), 3.0)
    assert err.value.deficit > 1e-10


def test_grid_geometry():
    g = make_grid(1.0, 0.5)
    assert g.size == 13
    assert g.index_of(0.0) == 6 and g.points[6] == 0
    # only the centre and its four neighbours have all four axis neighbours
    assert g.interior.sum() == 5
    assert np.all(np.abs(g.points) <= 1.0 + 1e-12)


def test_grid_gaussian_quadrature():
    g = make_grid(5.0, 0.05)
    # int d^2 alpha / pi exp(-|alpha|^2) = 1
    assert abs(np.sum(g.weights * np.exp(-np.abs(g.points) ** 2)) - 1.0) < 1e-10


@pytest.mark.parametrize("R,h", [(0.0, 0.1), (1.0, 0.0), (1.0, 2.0), (-1.0, 0.1)])
def test_bad_grids(R, h):
    with pytest.raises(ConfigError):
        make_grid(R, h)


def test_kernel_rows_are_conjugate_coherent_amplitudes():
    g = make_grid(2.0, 0.5)
    K = coherent_kernel(g, 8)
    j = 3
    assert np.allclose(K[j], np.conj(fock_amplitudes(g.points[j], 8)))


def test_identity_resolution_golden():
    # Dominated by the disc tail beyond R=6; frozen implementation value.
    err = identity_resolution_error(FockSpace(40), make_grid(6.0, 0.05), 6)
    assert err == pytest.approx(1.3641e-10, rel=1e-3)


def test_identity_resolution_block_bounds():
    with pytest.raises(ConfigError):
        identity_resolution_error(FockSpace(10), make_grid(6.0, 0.5), 6)
