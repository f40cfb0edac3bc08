"""Parametric representation of a qubit reduced state over coherent-state labels.

A joint pure state ``|psi> = sum_{k,xi} c[k, xi] |k> |xi>`` is rewritten as an
ensemble over the phase-space grid: at each label ``alpha`` the qubit sees the
unnormalized amplitudes ``a_k(alpha) = sum_xi c[k, xi] <alpha|xi>``, with
probability density ``chi2 = |a_+|^2 + |a_-|^2`` and pure state
``phi = a / sqrt(chi2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bosonic import FockSpace, PhaseSpaceGrid, coherent_kernel, coherent_vector
from .errors import ConfigError, CoverageError
from .io import write_csv
from .operators import DEFAULT_TOLERANCES, KET_PLUS, Tolerances, partial_trace_env


@dataclass(frozen=True, eq=False)
class JointState:
    """Amplitude table ``c[k, xi]``; row 0 is ``|+>``, row 1 is ``|->``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        c = np.array(self.amplitudes, dtype=complex)
        if c.ndim != 2 or c.shape[0] != 2:
            raise ConfigError(f"amplitude table must have shape (2, n_max), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "amplitudes", c)

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def vector(self):
        """Joint vector in qubit-major order."""
        return self.amplitudes.reshape(-1)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def from_vector(cls, psi, n_max: int | None = None) -> "JointState":
        psi = np.asarray(psi, dtype=complex)
        n = psi.size // 2 if n_max is None else n_max
        return cls(psi.reshape(2, n))

    @classmethod
    def product(cls, qubit, env) -> "JointState":
        return cls(np.outer(np.asarray(qubit, dtype=complex), np.asarray(env, dtype=complex)))

    @classmethod
    def coherent_product(cls, qubit, alpha0: complex, n_max: int, tol=DEFAULT_TOLERANCES):
        return cls.product(qubit, coherent_vector(FockSpace(n_max), alpha0, tol))

    def normalized(self) -> "JointState":
        return JointState(self.amplitudes / self.norm)

    def density(self):
        v = self.vector
        return np.outer(v, v.conj())

    def reduced(self):
        """Qubit reduced density matrix by direct partial trace."""
        c = self.amplitudes
        return c @ c.conj().T


def random_joint_state(n_max: int, rng: np.random.Generator, support: int | None = None) -> JointState:
    """Haar-like random pure state whose boson part lives on ``xi < support``.

    ``support`` defaults to ``n_max // 2`` so that the state stays inside the
    faithful block of the truncation.
    """
    support = n_max // 2 if support is None else support
    c = np.zeros((2, n_max), dtype=complex)
    c[:, :support] = rng.normal(size=(2, support)) + 1j * rng.normal(size=(2, support))
    return JointState(c / np.linalg.norm(c))


@dataclass(frozen=True, eq=False)
class ParametricField:
    """Per-point amplitudes ``a[j, k]`` on ``grid``; derived quantities are lazy."""

    grid: PhaseSpaceGrid
    a: np.ndarray
    eps_null: float = DEFAULT_TOLERANCES.null

    @cached_property
    def chi2(self):
        return np.sum(np.abs(self.a) ** 2, axis=1)

    @cached_property
    def mask(self):
        """True where chi2 falls below ``eps_null``."""
        return null_region_mask(self, self.eps_null)

    @cached_property
    def phi(self):
        """Normalized qubit state per point; a fixed ``|+>`` inside the null region."""
        phi = np.empty_like(self.a)
        live = ~self.mask
        phi[live] = self.a[live] / np.sqrt(self.chi2[live])[:, None]
        phi[~live] = KET_PLUS
        return phi

    @cached_property
    def gamma(self):
        """``gamma_k = |a_k|^2 / chi2``; zero in the null region."""
        g = np.zeros(self.a.shape, dtype=float)
        live = ~self.mask
        g[live] = np.abs(self.a[live]) ** 2 / self.chi2[live][:, None]
        return g

    @cached_property
    def R(self):
        """Unnormalized pointwise operators ``chi2 |phi><phi| = a a^dag``."""
        return self.a[:, :, None] * self.a.conj()[:, None, :]

    def norm_deviation(self) -> float:
        return float(abs(np.sum(self.grid.weights * self.chi2) - 1.0))


def decompose(psi: JointState, grid: PhaseSpaceGrid, tol: Tolerances = DEFAULT_TOLERANCES) -> ParametricField:
    """Evaluate ``a_k(alpha_j)`` on every grid node.

    Raises :class:`CoverageError` if the discrete normalization of chi^2
    misses 1 by more than ``tol.norm``.
    """
    if abs(psi.norm - 1.0) > tol.trace:
        raise ConfigError(f"joint state is not normalized (norm {psi.norm:.12g})")
    K = coherent_kernel(grid, psi.n_max)
    field = ParametricField(grid=grid, a=K @ psi.amplitudes.T, eps_null=tol.null)
    dev = field.norm_deviation()
    if dev > tol.norm:
        raise CoverageError(
            f"grid of radius {grid.R} misses chi^2 mass {dev:.3g} (tolerance {tol.norm:.1g})",
            deficit=dev,
        )
    return field


def reconstruct(field: ParametricField):
    """``rho = sum_j w_j chi2_j |phi_j><phi_j|``."""
    return np.einsum("j,jkl->kl", field.grid.weights, field.R)


def null_region_mask(field: ParametricField, eps: float):
    if eps < 0:
        raise ConfigError("eps must be non-negative")
    return field.chi2 < eps


def reconstruction_error(psi: JointState, field: ParametricField) -> float:
    exact = partial_trace_env(psi.density(), psi.n_max)
    return float(np.max(np.abs(reconstruct(field) - exact)))


FIELD_COLUMNS = ("re_alpha", "im_alpha", "chi2", "re_a_plus", "im_a_plus", "re_a_minus", "im_a_minus", "gamma_plus")


def write_field_csv(field: ParametricField, path) -> None:
    pts = field.grid.points
    rows = np.column_stack(
        [pts.real, pts.imag, field.chi2, field.a[:, 0].real, field.a[:, 0].imag,
         field.a[:, 1].real, field.a[:, 1].imag, field.gamma[:, 0]]
    )
    write_csv(path, FIELD_COLUMNS, rows)
