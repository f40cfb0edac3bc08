"""Label-local Lindblad operators built from the microscopic Hamiltonian.

For ``H = sum_i g_i O_i (x) E_i`` with boson operators ``E_i`` in
``{a, a^dag, a^dag a}``, each phase-space label carries

* ``theta_i(alpha) = <alpha|E_i|alpha>``,
* ``b_i^(k) = g_i {a_k, theta_i}`` (Poisson bracket on the complex plane),
* ``F_k = -i sum_i b_i^(k) O_i`` and ``L_k = (1 - conj(a_k) F_k) / a_k``.

The dissipative part of the reduced-state derivative is then
``sum_j w_j sum_k gamma_k (L_k R L_k^dag - 1/2 {L_k^dag L_k, R})`` with
``R = chi2 |phi><phi|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bosonic import PhaseSpaceGrid, fock_amplitudes
from .errors import ConfigError, ContractError
from .io import write_csv
from .operators import IDENTITY, dagger
from .parametric import JointState, ParametricField

ENV_OPERATORS = ("a", "a_dagger", "number")


@dataclass(frozen=True, eq=False)
class InteractionTerm:
    """One product term ``coupling * qubit_op (x) env_op`` of the Hamiltonian."""

    coupling: float
    qubit_op: np.ndarray
    env_op: str

    def __post_init__(self):
        if self.env_op not in ENV_OPERATORS:
            raise ConfigError(f"env_op must be one of {ENV_OPERATORS}, got {self.env_op!r}")
        op = np.array(self.qubit_op, dtype=complex)
        if op.shape != (2, 2):
            raise ConfigError(f"qubit_op must be 2x2, got {op.shape}")
        op.setflags(write=False)
        object.__setattr__(self, "qubit_op", op)


def theta(env_op: str, alpha):
    """Coherent-state expectation ``<alpha|E|alpha>``."""
    alpha = np.asarray(alpha, dtype=complex)
    if env_op == "a":
        return alpha
    if env_op == "a_dagger":
        return alpha.conj()
    if env_op == "number":
        return np.abs(alpha) ** 2 + 0j
    raise ConfigError(f"unknown env_op {env_op!r}")


def theta_derivatives(env_op: str, alpha):
    """Wirtinger derivatives ``(d theta/d alpha, d theta/d alpha^*)`` in closed form."""
    alpha = np.asarray(alpha, dtype=complex)
    one, zero = np.ones_like(alpha), np.zeros_like(alpha)
    if env_op == "a":
        return one, zero
    if env_op == "a_dagger":
        return zero, one
    if env_op == "number":
        return alpha.conj(), alpha
    raise ConfigError(f"unknown env_op {env_op!r}")


def wirtinger_field(values, grid: PhaseSpaceGrid):
    """Central-difference Wirtinger derivatives of grid values.

    ``values`` has the grid as its first axis. Returns ``(d/d alpha, d/d alpha^*)``
    with NaN at points lacking an axis neighbour.
    """
    values = np.asarray(values, dtype=complex)
    nb = grid.neighbors
    ok = grid.interior
    dx = np.full(values.shape, np.nan + 0j)
    dy = np.full(values.shape, np.nan + 0j)
    two_h = 2.0 * grid.h
    dx[ok] = (values[nb[ok, 0]] - values[nb[ok, 1]]) / two_h
    dy[ok] = (values[nb[ok, 2]] - values[nb[ok, 3]]) / two_h
    return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy)


def wirtinger(values, grid: PhaseSpaceGrid, j: int):
    """Wirtinger derivatives at grid point ``j``, or ``None`` on the boundary ring."""
    if not grid.interior[j]:
        return None
    values = np.asarray(values, dtype=complex)
    e, w, n, s = grid.neighbors[j]
    dx = (values[e] - values[w]) / (2.0 * grid.h)
    dy = (values[n] - values[s]) / (2.0 * grid.h)
    return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy)


def bracket(df, dfc, dg, dgc):
    """``{f, g} = df/dalpha dg/dalpha^* - df/dalpha^* dg/dalpha`` from derivatives."""
    return df * dgc - dfc * dg


def poisson_bracket(f, g, grid: PhaseSpaceGrid, j: int):
    """Finite-difference Poisson bracket of two grid fields at point ``j``.

    Returns ``None`` on the boundary ring.
    """
    wf = wirtinger(f, grid, j)
    wg = wirtinger(g, grid, j)
    if wf is None or wg is None:
        return None
    return bracket(*wf, *wg)


def analytic_amplitude_derivatives(psi: JointState, grid: PhaseSpaceGrid):
    """Exact Wirtinger derivatives of ``a_k(alpha) = sum_xi c[k, xi] <alpha|xi>``.

    With ``<alpha|xi> = exp(-|alpha|^2/2) conj(alpha)^xi / sqrt(xi!)``:
    ``d a_k/d alpha = -conj(alpha)/2 a_k`` and
    ``d a_k/d alpha^* = -alpha/2 a_k + sum_xi c[k, xi] sqrt(xi) <alpha|xi-1>``.
    """
    c = psi.amplitudes
    alpha = grid.points
    K = fock_amplitudes(alpha.conj(), psi.n_max)
    a = K @ c.T
    shifted = c[:, 1:] * np.sqrt(np.arange(1, psi.n_max))
    lowered = K[:, :-1] @ shifted.T
    da = -0.5 * alpha.conj()[:, None] * a
    dac = -0.5 * alpha[:, None] * a + lowered
    return da, dac


@dataclass(frozen=True, eq=False)
class LindbladField:
    """Per-point operators on a grid.

    ``F`` and ``L`` have shape ``(n_points, 2, 2, 2)`` indexed ``[j, k]``;
    ``active[j, k]`` marks the entries that enter the dissipator. Inactive
    entries hold zeros.
    """

    grid: PhaseSpaceGrid
    F: np.ndarray
    L: np.ndarray
    gamma: np.ndarray
    R: np.ndarray
    active: np.ndarray

    @property
    def assembled(self):
        """Points where at least one channel is active."""
        return np.any(self.active, axis=1)


def interaction_coefficients(field: ParametricField, terms: Sequence[InteractionTerm], method="fd", psi=None):
    """``b[j, i, k] = g_i {a_k, theta_i}(alpha_j)``; NaN on the boundary ring.

    ``method="fd"`` differentiates the stored amplitudes on the grid;
    ``method="analytic"`` uses :func:`analytic_amplitude_derivatives` and
    needs the joint state ``psi``.
    """
    if method == "fd":
        da, dac = wirtinger_field(field.a, field.grid)
    elif method == "analytic":
        if psi is None:
            raise ConfigError("analytic derivatives need the joint state")
        da, dac = analytic_amplitude_derivatives(psi, field.grid)
        da[~field.grid.interior] = np.nan
        dac[~field.grid.interior] = np.nan
    else:
        raise ConfigError(f"unknown derivative method {method!r}")
    alpha = field.grid.points
    b = np.empty((alpha.size, len(terms), 2), dtype=complex)
    for i, term in enumerate(terms):
        dt, dtc = theta_derivatives(term.env_op, alpha)
        b[:, i, :] = term.coupling * bracket(da, dac, dt[:, None], dtc[:, None])
    return b


def _all_F(field, terms, method="fd", psi=None):
    b = interaction_coefficients(field, terms, method, psi)
    ops = np.stack([t.qubit_op for t in terms])
    return -1j * np.einsum("jik,iab->jkab", b, ops)


def compute_F(field: ParametricField, terms: Sequence[InteractionTerm], j: int, method="fd", psi=None):
    """``(F_+, F_-)`` at grid point ``j``.

    Raises :class:`ContractError` at boundary or null-region points.
    """
    if not field.grid.interior[j] or field.mask[j]:
        raise ContractError(f"grid point {j} is on the boundary or in the null region")
    F = _all_F(field, terms, method, psi)[j]
    return F[0], F[1]


def lindblad_operator(a_k: complex, F_k):
    return (IDENTITY - np.conj(a_k) * F_k) / a_k


def compute_L(field: ParametricField, F_pair, j: int):
    """``(L_+, L_-)`` at point ``j`` from the pair returned by :func:`compute_F`.

    A channel whose ``|a_k|^2`` is below the null threshold yields ``None``.
    """
    out = []
    for k in range(2):
        a_k = field.a[j, k]
        if abs(a_k) ** 2 <= field.eps_null:
            out.append(None)
        else:
            out.append(lindblad_operator(a_k, F_pair[k]))
    return tuple(out)


def assemble(field: ParametricField, terms: Sequence[InteractionTerm], method="fd", psi=None) -> LindbladField:
    """Build F, L and the dissipator weights over the whole grid."""
    F = _all_F(field, terms, method, psi)
    live = field.grid.interior & ~field.mask
    active = live[:, None] & (np.abs(field.a) ** 2 > field.eps_null)
    F = np.where(live[:, None, None, None], F, 0)
    L = np.zeros_like(F)
    a = field.a[active]
    L[active] = (IDENTITY - np.conj(a)[:, None, None] * F[active]) / a[:, None, None]
    gamma = np.where(active, field.gamma, 0.0)
    return LindbladField(grid=field.grid, F=F, L=L, gamma=gamma, R=field.R, active=active)


def gksl_rhs(lfield: LindbladField):
    """Dissipative part of the reduced-state derivative, integrated over the grid."""
    L = lfield.L
    R = lfield.R[:, None, :, :]
    Ld = dagger(L)
    LdL = Ld @ L
    D = L @ R @ Ld - 0.5 * (LdL @ R + R @ LdL)
    weight = lfield.grid.weights[:, None] * lfield.gamma
    return np.einsum("jk,jkab->ab", weight, D)


F_COLUMNS = ("re_alpha", "im_alpha") + tuple(
    f"{part}_F_{name}_{r}{c}" for name in ("plus", "minus") for r in range(2) for c in range(2) for part in ("re", "im")
)


def write_F_csv(lfield: LindbladField, path) -> None:
    """One row per assembled point; columns alternate Re/Im of F_+ then F_-, row-major."""
    idx = np.flatnonzero(lfield.assembled)
    pts = lfield.grid.points[idx]
    F = lfield.F[idx].reshape(idx.size, 8)
    parts = np.stack([F.real, F.imag], axis=2).reshape(idx.size, 16)
    write_csv(path, F_COLUMNS, np.column_stack([pts.real, pts.imag, parts]))
