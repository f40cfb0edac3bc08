"""Dense complex operator algebra for a qubit coupled to a truncated boson.

Operators are plain ``numpy`` complex arrays. The subsystem a matrix lives on
is inferred from its shape: ``(2, 2)`` is the qubit, ``(N, N)`` a boson with
``n_max = N`` and ``(2N, 2N)`` the joint space. Joint indices are qubit-major,
``row = k * n_max + xi``, with qubit index 0 for ``|+>`` (the ``+1``
eigenvector of sigma_z) and 1 for ``|->``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np
import scipy.linalg

from .errors import ConfigError, ContractError, NumericError, SignatureError

QUBIT_DIM = 2

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# sigma+ |-> = |+>, sigma+ |+> = 0, so sigma- sigma+ = |-><-|.
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()

KET_PLUS = np.array([1, 0], dtype=complex)
KET_MINUS = np.array([0, 1], dtype=complex)

for _m in (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, SIGMA_PLUS, SIGMA_MINUS, KET_PLUS, KET_MINUS):
    _m.setflags(write=False)


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used across the package.

    herm, trace, pos
        Hermiticity residual, trace deviation and negative-eigenvalue floor
        accepted for density operators.
    unitary
        Max-norm of ``U^dag U - 1`` accepted for propagators.
    trunc
        Fock-tail mass tolerated when truncating coherent states.
    coherent
        Residual of ``a|alpha> - alpha|alpha>`` tolerated.
    null
        chi^2 below which a phase-space point carries no pure state.
    norm
        Deficit of the discrete chi^2 normalization tolerated.
    """

    herm: float = 1e-9
    trace: float = 1e-9
    pos: float = 1e-9
    unitary: float = 1e-10
    trunc: float = 1e-10
    coherent: float = 1e-8
    null: float = 1e-12
    norm: float = 1e-6

    def updated(self, overrides: dict | None) -> "Tolerances":
        if not overrides:
            return self
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
        values = {}
        for key, value in overrides.items():
            value = float(value)
            if not value >= 0:
                raise ConfigError(f"tolerance {key!r} must be non-negative")
            values[key] = value
        return replace(self, **values)


DEFAULT_TOLERANCES = Tolerances()


def _square(A, name="operator"):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SignatureError(f"{name} must be a square matrix, got shape {A.shape}")
    return A


def dagger(A):
    return np.conj(np.swapaxes(A, -1, -2))


def commutator(A, B):
    return A @ B - B @ A


def anticommutator(A, B):
    return A @ B + B @ A


def tensor(A, B):
    """Kronecker product of a qubit operator ``A`` with a boson operator ``B``.

    ``(A x B)[k*N + m, l*N + n] = A[k, l] * B[m, n]``.
    """
    A = _square(A, "qubit operator")
    B = _square(B, "boson operator")
    if A.shape[0] != QUBIT_DIM:
        raise SignatureError(f"first factor must be a qubit operator, got dim {A.shape[0]}")
    return np.kron(A, B).astype(complex, copy=False)


def joint_n_max(M) -> int:
    M = _square(M, "joint operator")
    dim = M.shape[0]
    if dim < QUBIT_DIM or dim % QUBIT_DIM:
        raise SignatureError(f"dimension {dim} is not a qubit x boson joint dimension")
    return dim // QUBIT_DIM


def partial_trace_env(M, n_max: int | None = None):
    """Trace out the boson from a joint operator, returning a 2x2 matrix."""
    M = _square(M, "joint operator")
    n = joint_n_max(M) if n_max is None else int(n_max)
    if M.shape[0] != QUBIT_DIM * n:
        raise SignatureError(f"joint operator of dim {M.shape[0]} does not match n_max={n}")
    return np.einsum("kmlm->kl", M.reshape(QUBIT_DIM, n, QUBIT_DIM, n))


def expm(A, scale: complex = 1.0):
    """``exp(scale * A)`` by scaling and squaring with a Pade kernel."""
    A = _square(A)
    X = scale * np.asarray(A, dtype=complex)
    if not np.all(np.isfinite(X)):
        raise NumericError("non-finite entries in exponent")
    # The squaring phase overflows well before this bound is reached.
    if np.linalg.norm(X, 1) > 700.0:
        raise NumericError(f"exponent norm {np.linalg.norm(X, 1):.3g} overflows double precision")
    U = scipy.linalg.expm(X)
    if not np.all(np.isfinite(U)):
        raise NumericError("matrix exponential overflowed")
    return U


def hermiticity_residual(A) -> float:
    A = np.asarray(A)
    return float(np.max(np.abs(A - dagger(A)))) if A.size else 0.0


def is_hermitian(A, tol: float = DEFAULT_TOLERANCES.herm) -> bool:
    return hermiticity_residual(A) <= tol


def unitarity_residual(U) -> float:
    U = _square(U)
    return float(np.max(np.abs(dagger(U) @ U - np.eye(U.shape[0]))))


def spectral_floor(M, tol: float = DEFAULT_TOLERANCES.herm) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    M = _square(M)
    res = hermiticity_residual(M)
    if res > tol:
        raise ContractError(f"spectral_floor needs a Hermitian matrix (residual {res:.3g})")
    herm = 0.5 * (M + dagger(M))
    return float(np.linalg.eigvalsh(herm)[0])


def trace_deviation(rho) -> float:
    return float(abs(np.trace(rho) - 1.0))


def check_density(rho, tol: Tolerances = DEFAULT_TOLERANCES):
    """Raise :class:`ContractError` unless ``rho`` is a valid density matrix."""
    rho = _square(rho, "density operator")
    dev = trace_deviation(rho)
    if dev > tol.trace:
        raise ContractError(f"trace deviates from 1 by {dev:.3g}")
    res = hermiticity_residual(rho)
    if res > tol.herm:
        raise ContractError(f"density operator not Hermitian (residual {res:.3g})")
    floor = spectral_floor(rho, tol.herm)
    if floor < -tol.pos:
        raise ContractError(f"density operator has negative eigenvalue {floor:.3g}")
    return rho


def projector(ket):
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def dissipator(L, rho):
    """``L rho L^dag - 1/2 {L^dag L, rho}``."""
    Ld = dagger(L)
    LdL = Ld @ L
    return L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)


def span_residual(A, basis=(IDENTITY, SIGMA_Z)) -> float:
    """Max-norm distance from ``A`` to its orthogonal projection on ``span(basis)``.

    Projection uses the Hilbert-Schmidt inner product.
    """
    B = np.stack([np.asarray(b, dtype=complex).ravel() for b in basis], axis=1)
    a = np.asarray(A, dtype=complex).ravel()
    coef, *_ = np.linalg.lstsq(B, a, rcond=None)
    return float(np.max(np.abs(a - B @ coef)))
