"""Qubit-boson models: pure dephasing and Jaynes-Cummings.

Both share ``H_env = omega a^dag a``. Pure dephasing couples through
``g sigma_z (x) (a + a^dag)``, Jaynes-Cummings through
``g (sigma+ (x) a + sigma- (x) a^dag)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad

from .bosonic import FockSpace, PhaseSpaceGrid
from .dynamics import Channel, coefficient_b
from .errors import ConfigError
from .lindblad_field import InteractionTerm, interaction_coefficients
from .operators import (
    IDENTITY,
    KET_PLUS,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    commutator,
    tensor,
)
from .parametric import JointState, ParametricField


@dataclass(frozen=True)
class PureDephasingModel:
    omega: float
    g: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ConfigError("omega must be positive")
        if not self.g >= 0:
            raise ConfigError("g must be non-negative")

    def terms(self) -> list[InteractionTerm]:
        return [
            InteractionTerm(self.omega, IDENTITY, "number"),
            InteractionTerm(self.g, SIGMA_Z, "a"),
            InteractionTerm(self.g, SIGMA_Z, "a_dagger"),
        ]

    def hamiltonian(self, n_max: int):
        fs = FockSpace(n_max)
        return tensor(IDENTITY, self.omega * fs.number) + self.g * tensor(SIGMA_Z, fs.a + fs.adag)


@dataclass(frozen=True, eq=False)
class JaynesCummingsModel:
    """``T_tilde`` and ``H_tilde_eff`` are the constants of the classical-limit equation."""

    omega: float
    g: float
    T_tilde: float = 0.0
    H_tilde_eff: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=complex))

    def __post_init__(self):
        if not self.omega > 0:
            raise ConfigError("omega must be positive")
        if not self.g >= 0:
            raise ConfigError("g must be non-negative")
        H = np.asarray(self.H_tilde_eff, dtype=complex)
        if H.shape != (2, 2) or np.max(np.abs(H - H.conj().T)) > 1e-12:
            raise ConfigError("H_tilde_eff must be a Hermitian 2x2 matrix")
        object.__setattr__(self, "H_tilde_eff", H)

    def terms(self) -> list[InteractionTerm]:
        return [
            InteractionTerm(self.omega, IDENTITY, "number"),
            InteractionTerm(self.g, SIGMA_PLUS, "a"),
            InteractionTerm(self.g, SIGMA_MINUS, "a_dagger"),
        ]

    def hamiltonian(self, n_max: int):
        fs = FockSpace(n_max)
        return tensor(IDENTITY, self.omega * fs.number) + self.g * (
            tensor(SIGMA_PLUS, fs.a) + tensor(SIGMA_MINUS, fs.adag)
        )


# -- pure dephasing: closed forms -------------------------------------------


def beta(m: PureDephasingModel, t):
    """``beta(t) = (g/omega)(1 - exp(-i omega t))``."""
    return (m.g / m.omega) * (1.0 - np.exp(-1j * m.omega * np.asarray(t, dtype=float)))


def _log_abs_sin_sq(z):
    """``log|sin z|^2`` without overflow for large ``Im z``."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, np.abs(z.imag)
    out = np.empty(z.shape)
    small = y < 300.0
    with np.errstate(divide="ignore"):
        out[small] = np.log(np.abs(np.sin(z[small])) ** 2)
    # |sin z|^2 = (cosh 2y - cos 2x) / 2
    yb, xb = y[~small], x[~small]
    out[~small] = 2 * yb - np.log(4.0) + np.log1p(np.exp(-4 * yb) - 2 * np.cos(2 * xb) * np.exp(-2 * yb))
    return out


def log_rate_T(m: PureDephasingModel, t):
    b = beta(m, t)
    return np.log(0.5) - np.abs(b) ** 2 + _log_abs_sin_sq(m.g * b)


def rate_T(m: PureDephasingModel, t):
    """Peak-collapsed dephasing rate ``T = 1/2 exp(-|beta|^2) |sin(g beta)|^2`` (complex beta)."""
    out = np.exp(log_rate_T(m, t))
    return float(out) if np.ndim(out) == 0 else out


def rate_T_small_g(m: PureDephasingModel, t):
    """Weak-coupling limit ``(g^4/omega^2)(1 - cos omega t)``."""
    return (m.g**4 / m.omega**2) * (1.0 - np.cos(m.omega * np.asarray(t, dtype=float)))


def integrated_rate(m: PureDephasingModel, t: float) -> float:
    """``int_0^t T(s) ds`` by adaptive quadrature."""
    period = 2 * np.pi / m.omega
    # Break at whole periods so quad sees one smooth lobe pattern at a time.
    edges = list(np.arange(0.0, t, period)) + [t]
    return float(sum(quad(lambda s: rate_T(m, s), a, b, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
                     for a, b in zip(edges[:-1], edges[1:])))


def dephasing_coherence(m: PureDephasingModel, t, rho_pm0: complex, h: float = 0.0):
    """Closed-form ``rho_{+-}(t)`` of the classical-limit equation with field ``h`` constant."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    decay = np.array([integrated_rate(m, ti) for ti in t])
    return rho_pm0 * np.exp(-2j * h * t - 2 * decay)


def exact_coherence_modulus(m: PureDephasingModel, t):
    """``|rho_{+-}(t)| = 1/2 exp(-2|beta(t)|^2)`` for ``(|+>+|->)/sqrt2 (x) |0>``."""
    return 0.5 * np.exp(-2 * np.abs(beta(m, t)) ** 2)


class ClassicalCoefficients(NamedTuple):
    d_plus: complex
    d_minus: complex
    b_plus: complex
    b_minus: complex


def classical_coefficients(m: PureDephasingModel, alpha: complex, t: float) -> ClassicalCoefficients:
    """Classical-limit ``d_pm``, ``b_pm`` of ``F_pm = d_pm 1 + b_pm sigma_z``.

    They belong to the initial state ``(|+> + |->)/sqrt2 (x) |env>``.
    """
    b = complex(beta(m, t))
    env = np.exp(-0.5 * abs(b) ** 2) / np.sqrt(2)
    out = []
    for s in (1, -1):
        phase = np.exp(-s * 1j * m.omega * b * np.conj(alpha))
        out.append((env * phase * np.cos(m.g * b), -s * 1j * env * phase * np.sin(m.g * b)))
    (dp, bp), (dm, bm) = out
    return ClassicalCoefficients(complex(dp), complex(dm), complex(bp), complex(bm))


def rate_T_resolved(m: PureDephasingModel, alpha: complex, t: float, gamma=(0.5, 0.5)) -> float:
    """Label-resolved rate ``sum_k gamma_k |b_k(alpha)|^2``."""
    c = classical_coefficients(m, alpha, t)
    return float(gamma[0] * abs(c.b_plus) ** 2 + gamma[1] * abs(c.b_minus) ** 2)


class BCHResidual(NamedTuple):
    commutator: float
    double_y: float
    double_ybar: float

    @property
    def max(self) -> float:
        return max(self)


def bch_commutator_check(m: PureDephasingModel, alpha: complex, n_max: int = 40) -> BCHResidual:
    """Check the commutator identities behind the displacement factorization.

    With ``Y = (g sigma_z + omega alpha) (x) a^dag`` and
    ``Ybar = (g sigma_z + omega alpha^*) (x) a``, compares ``[Y, Ybar]`` with
    ``-(g^2 + omega^2|alpha|^2) - g omega (alpha + alpha^*) sigma_z`` and
    returns the max-norms on the faithful block (Fock levels below ``n_max/2``).
    """
    fs = FockSpace(n_max)
    alpha = complex(alpha)
    g, w = m.g, m.omega
    Y = tensor(g * SIGMA_Z + w * alpha * IDENTITY, fs.adag)
    Yb = tensor(g * SIGMA_Z + w * alpha.conjugate() * IDENTITY, fs.a)
    C = commutator(Y, Yb)
    expected = tensor(-(g**2 + w**2 * abs(alpha) ** 2) * IDENTITY - g * w * 2 * alpha.real * SIGMA_Z, fs.identity)
    keep = np.concatenate([np.arange(fs.faithful_block), n_max + np.arange(fs.faithful_block)])
    block = np.ix_(keep, keep)

    def res(X):
        return float(np.max(np.abs(X[block])))

    return BCHResidual(res(C - expected), res(commutator(Y, C)), res(commutator(Yb, C)))


def pd_classical_equation(m: PureDephasingModel, h=0.0):
    """``(H_eff, jump)`` for the classical-limit dephasing equation.

    ``h`` (constant or callable of t) sets ``H_eff = h sigma_z``; the jump is
    ``sigma_z`` at rate :func:`rate_T`. Since ``sigma_z^dag sigma_z = 1`` the
    standard dissipator reduces to ``T (sigma_z rho sigma_z - rho)``.
    """
    h_fn = h if callable(h) else (lambda t, _h=float(h): _h)
    if m.g == 0:
        rate = 0.0
    else:
        def rate(t):
            return rate_T(m, t)
    return (lambda t: h_fn(t) * SIGMA_Z), Channel(rate, SIGMA_Z)


def effective_field(m: PureDephasingModel, psi: JointState, field: ParametricField, n_max: int | None = None) -> float:
    """``h`` of ``H_eff = h sigma_z`` from the label integral.

    ``h = sum_j w_j / chi2_j sum_k Im(a_k b_k + |a_k|^2 conj(d_k) B_k)``, where
    ``b_k`` is the amplitude derivative from the joint Schroedinger equation
    and ``F_k = d_k 1 + B_k sigma_z`` are the label-local operators.
    Boundary and null-region points are skipped.
    """
    H = m.hamiltonian(psi.n_max if n_max is None else n_max)
    grid = field.grid
    bk = coefficient_b(H, psi, grid)
    coef = interaction_coefficients(field, m.terms())
    # F_k = -i (b_number 1 + (b_a + b_adag) sigma_z)
    d = -1j * coef[:, 0, :]
    B = -1j * (coef[:, 1, :] + coef[:, 2, :])
    live = grid.interior & ~field.mask
    a = field.a[live]
    integrand = np.imag(a * bk[live] + np.abs(a) ** 2 * np.conj(d[live]) * B[live]).sum(axis=1) / field.chi2[live]
    return float(np.sum(grid.weights[live] * integrand))


# -- strong coupling --------------------------------------------------------

DEFAULT_G_LADDER = (1.0, 2.0, 4.0, 8.0, 16.0)


@dataclass
class GammaCurve:
    g: float
    t: np.ndarray
    T: np.ndarray
    normalized: np.ndarray
    fraction_below: float


def gamma_curve(omega: float, g: float, samples: int = 4000, threshold: float = 0.01) -> GammaCurve:
    """One period of ``T(t)`` and ``T/max T``, with the fraction of the period below ``threshold``."""
    if samples < 2:
        raise ConfigError("samples must be at least 2")
    m = PureDephasingModel(omega, g)
    t = np.linspace(0.0, 2 * np.pi / omega, samples, endpoint=False)
    logT = log_rate_T(m, t)
    normalized = np.exp(logT - np.max(logT)) if g > 0 else np.zeros_like(t)
    with np.errstate(over="ignore"):
        T = np.exp(logT)
    frac = float(np.mean(normalized < threshold)) if g > 0 else 1.0
    return GammaCurve(g=g, t=t, T=T, normalized=normalized, fraction_below=frac)


def strong_coupling_report(omega: float, g_list: Sequence[float], samples: int = 4000,
                           threshold: float = 0.01) -> list[GammaCurve]:
    """Normalized rate curves for each coupling in ``g_list``."""
    if len(g_list) == 0:
        raise ConfigError("g_list must not be empty")
    return [gamma_curve(omega, float(g), samples, threshold) for g in g_list]


# -- Jaynes-Cummings --------------------------------------------------------


def jc_classical_equation(m: JaynesCummingsModel):
    """``(H_tilde_eff, jump)`` with jump ``sigma+`` at constant rate ``T_tilde``."""
    if m.T_tilde < 0:
        raise ConfigError("T_tilde must be non-negative")
    return m.H_tilde_eff, Channel(float(m.T_tilde), SIGMA_PLUS)


def jc_factorized_displacement(m: JaynesCummingsModel, alpha: complex, n_max: int, qubit=KET_PLUS):
    """``exp(-i g sigma- (x) a^dag) exp(-i omega alpha a^dag) |qubit, 0>`` with the vacuum weight.

    The second exponential carries the factor ``exp(-|omega alpha|^2/2)`` so
    that at ``g = 0`` the result is the coherent state ``|-i omega alpha>``.
    The first exponential is exact at first order because ``(sigma-)^2 = 0``.
    """
    fs = FockSpace(n_max)
    z = -1j * m.omega * complex(alpha)
    env = np.empty(n_max, dtype=complex)
    # exp(z a^dag)|0> = sum_n z^n / sqrt(n!) |n>
    env[0] = np.exp(-0.5 * abs(z) ** 2)
    for n in range(1, n_max):
        env[n] = env[n - 1] * z / np.sqrt(n)
    psi = np.kron(np.asarray(qubit, dtype=complex), env)
    return psi - 1j * m.g * (tensor(SIGMA_MINUS, fs.adag) @ psi)
