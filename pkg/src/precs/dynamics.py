"""Time evolution: exact joint propagation, label flow and fixed-step RK4 master equations."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bosonic import PhaseSpaceGrid, coherent_kernel, fock_amplitudes
from .errors import ConfigError, ContractError
from .io import write_csv
from .operators import (
    DEFAULT_TOLERANCES,
    Tolerances,
    dagger,
    expm,
    hermiticity_residual,
    projector,
)
from .parametric import JointState

log = logging.getLogger(__name__)

DEFAULT_DT = 1e-3


@dataclass
class Trajectory:
    """Snapshots at increasing ``times``; ``states`` are 2x2 densities or :class:`JointState`."""

    times: np.ndarray
    states: list
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.states) != self.times.size:
            raise ContractError("times and states differ in length")

    def densities(self):
        """Qubit reduced densities, shape ``(n_times, 2, 2)``."""
        if self.states and isinstance(self.states[0], JointState):
            return np.stack([s.reduced() for s in self.states])
        return np.stack(self.states)

    def diagnostics(self):
        rho = self.densities()
        trace_dev = np.abs(np.trace(rho, axis1=1, axis2=2) - 1.0)
        herm = np.array([hermiticity_residual(r) for r in rho])
        min_eig = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[:, 0]
        return {"trace_dev": trace_dev, "herm": herm, "min_eig": min_eig}


TRAJECTORY_COLUMNS = ("t", "re_rho_pp", "re_rho_mm", "re_rho_pm", "im_rho_pm", "trace_dev", "min_eig")


def write_trajectory_csv(traj: Trajectory, path) -> None:
    rho = traj.densities()
    d = traj.diagnostics()
    rows = np.column_stack(
        [traj.times, rho[:, 0, 0].real, rho[:, 1, 1].real, rho[:, 0, 1].real, rho[:, 0, 1].imag,
         d["trace_dev"], d["min_eig"]]
    )
    write_csv(path, TRAJECTORY_COLUMNS, rows)


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ConfigError("times must be a non-empty 1-d sequence")
    if np.any(np.diff(times) <= 0):
        raise ConfigError("times must be strictly increasing")
    return times


def evolve_exact(H, psi0: JointState, times, tol: Tolerances = DEFAULT_TOLERANCES) -> Trajectory:
    """``|psi(t)> = exp(-iHt)|psi0>`` sampled at ``times`` (``psi0`` is the state at t=0).

    One propagator is computed per distinct time gap and reused.
    """
    H = np.asarray(H, dtype=complex)
    res = hermiticity_residual(H)
    if res > tol.herm:
        raise ContractError(f"Hamiltonian is not Hermitian (residual {res:.3g})")
    if abs(psi0.norm - 1) > tol.trace:
        raise ContractError(f"initial state not normalized (norm {psi0.norm:.12g})")
    times = _check_times(times)
    cache: dict[float, np.ndarray] = {}
    psi = psi0.vector.copy()
    t_prev = 0.0
    states = []
    for t in times:
        gap = float(t - t_prev)
        if gap != 0.0:
            U = cache.get(gap)
            if U is None:
                U = cache[gap] = expm(H, -1j * gap)
            psi = U @ psi
        states.append(JointState.from_vector(psi, psi0.n_max))
        t_prev = t
    return Trajectory(times, states)


def hamilton_flow(omega: float, alpha0: complex, t):
    """Label of a free oscillator, ``alpha(t) = alpha0 exp(-i omega t)``."""
    return alpha0 * np.exp(-1j * omega * np.asarray(t))


def _as_callable(x) -> Callable[[float], object]:
    if callable(x):
        return x
    return lambda t, _x=x: _x


@dataclass
class Channel:
    """A jump operator with a time-dependent non-negative rate."""

    rate: Callable[[float], float] | float
    op: Callable[[float], np.ndarray] | np.ndarray

    def at(self, t):
        r = float(_as_callable(self.rate)(t))
        if r < 0:
            raise ContractError(f"negative rate {r:.6g} at t={t:.6g}")
        return r, np.asarray(_as_callable(self.op)(t), dtype=complex)


def _channels(jumps) -> list[Channel]:
    return [j if isinstance(j, Channel) else Channel(*j) for j in jumps]


def _generator(H_eff, channels):
    H_fn = _as_callable(H_eff)

    def rhs(t, rho):
        H = np.asarray(H_fn(t), dtype=complex)
        out = -1j * (H @ rho - rho @ H)
        for ch in channels:
            r, L = ch.at(t)
            if r == 0.0:
                continue
            Ld = dagger(L)
            LdL = Ld @ L
            out = out + r * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
        return out

    return rhs


def _rk4(rhs, y0, times, dt, t0):
    """Fixed-step RK4; each gap between outputs is split into equal steps no longer than ``dt``."""
    y = np.array(y0, dtype=complex)
    out = []
    t = t0
    for t_next in times:
        gap = t_next - t
        if gap < 0:
            raise ConfigError("output times precede the initial time")
        n = int(np.ceil(gap / dt - 1e-9)) if gap > 0 else 0
        step = gap / n if n else 0.0
        for i in range(n):
            ti = t + i * step
            k1 = rhs(ti, y)
            k2 = rhs(ti + 0.5 * step, y + 0.5 * step * k1)
            k3 = rhs(ti + 0.5 * step, y + 0.5 * step * k2)
            k4 = rhs(ti + step, y + step * k3)
            y = y + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t_next
        out.append(y.copy())
    return out


def _positivity_warnings(traj: Trajectory, tol: Tolerances):
    d = traj.diagnostics()
    bad = np.flatnonzero(d["min_eig"] < -tol.pos)
    if bad.size:
        i = bad[0]
        msg = (f"positivity breached at {bad.size} sample(s); first at t={traj.times[i]:.6g} "
               f"with min eigenvalue {d['min_eig'][i]:.3g}")
        log.warning(msg)
        traj.warnings.append(msg)


def evolve_gksl(H_eff, jumps: Sequence, rho0, times, dt: float = DEFAULT_DT, t0: float = 0.0,
                tol: Tolerances = DEFAULT_TOLERANCES) -> Trajectory:
    """Integrate ``drho/dt = -i[H, rho] + sum_k r_k(t) D[L_k](rho)`` with classic RK4.

    ``H_eff`` and each rate/operator of ``jumps`` (pairs ``(rate, L)`` or
    :class:`Channel`) may be constants or callables of ``t``. Negative rates
    raise :class:`ContractError`; positivity breaches are recorded in
    ``Trajectory.warnings`` but not corrected.
    """
    if not dt > 0:
        raise ConfigError("dt must be positive")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (2, 2):
        raise ConfigError("rho0 must be a 2x2 matrix")
    times = _check_times(times)
    rhs = _generator(H_eff, _channels(jumps))
    traj = Trajectory(times, _rk4(rhs, rho0, times, dt, t0))
    _positivity_warnings(traj, tol)
    return traj


@dataclass
class Branch:
    """One classical environment configuration.

    ``weight`` is its probability, ``state`` the initial qubit ket (or rank-1
    projector) and ``channels`` the branch-local ``(gamma_k, F_k)`` pairs.
    """

    weight: float
    state: np.ndarray
    channels: Sequence


def flowing_channel(flow: Callable[[float], complex], F_of_label, gamma_of_label) -> Channel:
    """Channel whose operator and rate follow a label trajectory ``flow(t)``."""
    return Channel(rate=lambda t: gamma_of_label(flow(t)), op=lambda t: F_of_label(flow(t)))


def evolve_decoupled_markov(H_eff, branches: Sequence[Branch], times, dt: float = DEFAULT_DT, t0: float = 0.0,
                            tol: Tolerances = DEFAULT_TOLERANCES) -> Trajectory:
    """Branch-resolved classical-limit equation.

    Each branch part evolves under its own channels,
    ``dP_i/dt = -i[H, P_i] + sum_k gamma_ki D[F_ki](P_i)``, and the reduced
    state is ``rho = sum_i p_i P_i``. When ``sqrt(gamma_ki) F_ki`` is the same
    for every branch this coincides with :func:`evolve_gksl`.
    """
    if not branches:
        raise ConfigError("at least one branch is required")
    weights = np.array([b.weight for b in branches], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ConfigError(f"branch weights must be non-negative and sum to 1, got sum {weights.sum():.15g}")
    parts = []
    for b in branches:
        s = np.asarray(b.state, dtype=complex)
        P = projector(s / np.linalg.norm(s)) if s.ndim == 1 else s
        if np.max(np.abs(P @ P - P)) > tol.trace or abs(np.trace(P) - 1) > tol.trace:
            raise ConfigError("each branch must start in a rank-1 projector")
        parts.append(P)
    if not dt > 0:
        raise ConfigError("dt must be positive")
    times = _check_times(times)
    gens = [_generator(H_eff, _channels(b.channels)) for b in branches]

    def rhs(t, stack):
        return np.stack([g(t, P) for g, P in zip(gens, stack)])

    stacks = _rk4(rhs, np.stack(parts), times, dt, t0)
    states = [np.einsum("i,iab->ab", weights, s) for s in stacks]
    traj = Trajectory(times, states)
    _positivity_warnings(traj, tol)
    return traj


def coefficient_b(H, psi: JointState, grid: PhaseSpaceGrid, j: int | None = None):
    """``b_k(alpha) = sum_xi dc[k, xi]/dt <alpha|xi>`` with ``dc/dt = -i H c``.

    Returns the pair at point ``j``, or an ``(n_points, 2)`` array if ``j`` is None.
    """
    cdot = (-1j * (np.asarray(H, dtype=complex) @ psi.vector)).reshape(2, psi.n_max)
    if j is not None:
        K = fock_amplitudes(np.conj(grid.points[j]), psi.n_max)
        b = cdot @ K
        return complex(b[0]), complex(b[1])
    return coherent_kernel(grid, psi.n_max) @ cdot.T


def reduced_coherence(traj: Trajectory):
    """``rho_{+-}(t)`` of the qubit along a trajectory."""
    return traj.densities()[:, 0, 1]

