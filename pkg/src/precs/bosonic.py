"""Truncated Fock space, Glauber coherent states and phase-space grids.

Coherent states are expanded as ``|alpha> = exp(-|alpha|^2/2) sum_n alpha^n/sqrt(n!) |n>``
and phase-space integrals use the flat measure ``d^2 alpha / pi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.stats import poisson

from .errors import ConfigError, TruncationError
from .operators import DEFAULT_TOLERANCES, expm


@dataclass(frozen=True)
class FockSpace:
    """Fock states ``|0>, ..., |n_max - 1>``."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ConfigError(f"n_max must be a positive integer, got {self.n_max!r}")

    @cached_property
    def a(self):
        a = np.diag(np.sqrt(np.arange(1, self.n_max, dtype=float)), k=1).astype(complex)
        a.setflags(write=False)
        return a

    @cached_property
    def adag(self):
        ad = self.a.T.copy()
        ad.setflags(write=False)
        return ad

    @cached_property
    def number(self):
        n = np.diag(np.arange(self.n_max, dtype=float)).astype(complex)
        n.setflags(write=False)
        return n

    @property
    def identity(self):
        return np.eye(self.n_max, dtype=complex)

    @property
    def faithful_block(self) -> int:
        """Number of low Fock levels on which truncated identities are asserted."""
        return max(1, self.n_max // 2)

    def basis(self, n: int):
        if not 0 <= n < self.n_max:
            raise ConfigError(f"Fock index {n} outside 0..{self.n_max - 1}")
        v = np.zeros(self.n_max, dtype=complex)
        v[n] = 1.0
        return v


def truncation_tail(alpha: complex, n_max: int) -> float:
    """Probability mass of ``|alpha>`` on Fock levels ``n >= n_max``."""
    return float(poisson.sf(n_max - 1, abs(alpha) ** 2))


def _check_truncation(fs: FockSpace, alpha: complex, tol: float):
    tail = truncation_tail(alpha, fs.n_max)
    if tail > tol:
        raise TruncationError(
            f"|alpha|^2 = {abs(alpha) ** 2:.4g} too large for n_max = {fs.n_max} "
            f"(tail mass {tail:.3g} > {tol:.1g})",
            deficit=tail,
        )


def fock_amplitudes(alpha, n_max: int):
    """``<n|alpha>`` for ``n < n_max``; ``alpha`` may be an array (extra leading axes).

    Uses the recurrence ``<n+1|alpha> = <n|alpha> * alpha / sqrt(n+1)``, which
    avoids factorial overflow.
    """
    alpha = np.asarray(alpha, dtype=complex)
    out = np.empty(alpha.shape + (n_max,), dtype=complex)
    out[..., 0] = np.exp(-0.5 * np.abs(alpha) ** 2)
    for n in range(1, n_max):
        out[..., n] = out[..., n - 1] * alpha / np.sqrt(n)
    return out


def coherent_vector(fs: FockSpace, alpha: complex, tol=DEFAULT_TOLERANCES):
    """Truncated coherent state ``|alpha>`` in the Fock basis of ``fs``."""
    _check_truncation(fs, alpha, tol.trunc)
    return fock_amplitudes(complex(alpha), fs.n_max)


def overlap(beta: complex, alpha: complex) -> complex:
    """``<beta|alpha>`` in closed form."""
    alpha, beta = complex(alpha), complex(beta)
    return complex(np.exp(-0.5 * (abs(alpha) ** 2 + abs(beta) ** 2) + beta.conjugate() * alpha))


def displacement(fs: FockSpace, alpha: complex, tol=DEFAULT_TOLERANCES):
    """``D(alpha) = exp(alpha a^dag - alpha^* a)`` on the truncated space."""
    _check_truncation(fs, alpha, tol.trunc)
    alpha = complex(alpha)
    return expm(alpha * fs.adag - alpha.conjugate() * fs.a)


@dataclass(frozen=True, eq=False)
class PhaseSpaceGrid:
    """Square lattice ``alpha = h * (ix + i*iy)`` restricted to ``|alpha| <= R``.

    Each node is the centre of an ``h x h`` cell and carries the weight
    ``h^2 / pi`` so that ``sum_j w_j f(alpha_j)`` approximates
    ``int d^2 alpha / pi f(alpha)``. Points are stored in row-major scan order
    (``iy`` outer, ``ix`` inner).
    """

    R: float
    h: float
    ix: np.ndarray = field(repr=False)
    iy: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.ix.size

    def __len__(self):
        return self.size

    @cached_property
    def points(self):
        return self.h * (self.ix + 1j * self.iy)

    @cached_property
    def weights(self):
        return np.full(self.size, self.h**2 / np.pi)

    @cached_property
    def neighbors(self):
        """``(size, 4)`` indices of the +x, -x, +y, -y neighbours, ``-1`` if absent."""
        m = int(np.max(np.abs(self.ix))) + 2
        lookup = np.full((2 * m + 1, 2 * m + 1), -1, dtype=np.intp)
        lookup[self.iy + m, self.ix + m] = np.arange(self.size)
        return np.stack(
            [
                lookup[self.iy + m, self.ix + m + 1],
                lookup[self.iy + m, self.ix + m - 1],
                lookup[self.iy + m + 1, self.ix + m],
                lookup[self.iy + m - 1, self.ix + m],
            ],
            axis=1,
        )

    @cached_property
    def interior(self):
        """True where all four axis neighbours exist."""
        return np.all(self.neighbors >= 0, axis=1)

    def index_of(self, alpha: complex) -> int:
        """Index of the grid node closest to ``alpha``."""
        return int(np.argmin(np.abs(self.points - alpha)))


def make_grid(R: float, h: float) -> PhaseSpaceGrid:
    R, h = float(R), float(h)
    if not (R > 0 and 0 < h < R):
        raise ConfigError(f"grid needs R > 0 and 0 < h < R, got R={R}, h={h}")
    m = int(np.floor(R / h))
    k = np.arange(-m, m + 1)
    iy, ix = np.meshgrid(k, k, indexing="ij")
    ix, iy = ix.ravel(), iy.ravel()
    # Small slack keeps nodes that sit on the circle up to rounding.
    keep = (ix * h) ** 2 + (iy * h) ** 2 <= R * R * (1 + 1e-12)
    return PhaseSpaceGrid(R=R, h=h, ix=ix[keep], iy=iy[keep])


def coherent_kernel(grid: PhaseSpaceGrid, n_max: int):
    """Matrix ``K[j, n] = <alpha_j|n> = exp(-|alpha_j|^2/2) conj(alpha_j)^n / sqrt(n!)``."""
    return fock_amplitudes(np.conj(grid.points), n_max)


def identity_resolution_error(fs: FockSpace, grid: PhaseSpaceGrid, block: int) -> float:
    """Max-norm of ``sum_j w_j |alpha_j><alpha_j| - 1`` on Fock levels ``< block``."""
    if not 1 <= block <= max(1, fs.n_max // 2):
        raise ConfigError(f"block must lie in 1..{max(1, fs.n_max // 2)}, got {block}")
    K = coherent_kernel(grid, block)
    # (sum_j w_j |alpha_j><alpha_j|)[m, n] = sum_j w_j <m|alpha_j><alpha_j|n>
    S = (K.conj().T * grid.weights) @ K
    return float(np.max(np.abs(S - np.eye(block))))
