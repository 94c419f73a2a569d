"""Gaussian initial data, computational domain and parameter conversion."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import GradState, Nu

#: Half-width of the computational domain in units of rho_star.
DOMAIN_FACTOR = 4.5
#: Uniform x-samples used when reducing a profile to pointwise gradient data.
DEFAULT_SAMPLES = 2049


@dataclass(frozen=True)
class GaussianData:
    """Initial data E0 = k1 x exp(-x^2/sigma), V0 = -k2 x exp(-x^2/sigma).

    ``rho_star`` is the localisation scale with sigma = rho_star**2 / 2.
    ``a_star`` is informational and only set by :meth:`from_laser`.
    """

    k1: float = 0.0
    k2: float = 0.0
    rho_star: float = 1.0
    a_star: float | None = None

    def __post_init__(self):
        if not self.rho_star > 0.0:
            raise ValueError("rho_star must be positive")

    @classmethod
    def from_laser(cls, a_star: float, rho_star: float, k2: float = 0.0) -> "GaussianData":
        return cls(k1=(a_star / rho_star) ** 2, k2=k2, rho_star=rho_star, a_star=a_star)

    @classmethod
    def from_sigma(cls, k1: float, sigma: float, k2: float = 0.0) -> "GaussianData":
        if not sigma > 0.0:
            raise ValueError("sigma must be positive")
        return cls(k1=k1, k2=k2, rho_star=math.sqrt(2.0 * sigma))

    @property
    def sigma(self) -> float:
        return 0.5 * self.rho_star**2

    @property
    def e_max(self) -> float:
        """Peak of |E0|, reached at x = sqrt(sigma/2)."""
        return abs(self.k1) * math.sqrt(self.sigma / 2.0) * math.exp(-0.5)

    def extremum_points(self) -> np.ndarray:
        """Stationary points of the profile derivative: 0 and +/-sqrt(3 sigma / 2)."""
        r = math.sqrt(1.5 * self.sigma)
        return np.array([-r, 0.0, r])


@dataclass(frozen=True)
class Domain:
    """Uniform mesh of ``n_cells`` cells on [-d, d]."""

    d: float
    n_cells: int

    def __post_init__(self):
        if not self.d > 0.0:
            raise ValueError("domain half-width must be positive")
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise ValueError("n_cells must be an integer >= 2")

    @classmethod
    def for_profile(cls, data: GaussianData, n_cells: int, factor: float = DOMAIN_FACTOR) -> "Domain":
        return cls(d=factor * data.rho_star, n_cells=n_cells)

    @property
    def h(self) -> float:
        return 2.0 * self.d / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(-self.d, self.d, self.n_cells + 1)


@dataclass(frozen=True)
class PlasmaParams:
    """Dimensionless plasma and laser parameters.

    eta is the ratio of electron interaction energy to kinetic energy,
    a0 the normalised laser amplitude and tau_star the pulse duration.
    """

    Z: int = 1
    ln_Lambda: float = 10.0
    eta: float = 0.0
    a0: float = 0.0
    tau_star: float = 2.0

    def __post_init__(self):
        if self.Z <= 0 or self.ln_Lambda <= 0 or self.eta < 0 or self.a0 < 0 or self.tau_star <= 0:
            raise ValueError("plasma parameters must be positive")


def eval_profile(data: GaussianData, x):
    """Return (V0, E0, q0, s0) at ``x`` with exact x-derivatives."""
    x = np.asarray(x, dtype=float)
    sig = data.sigma
    g = np.exp(-x * x / sig)
    dg = (1.0 - 2.0 * x * x / sig) * g  # d/dx (x exp(-x^2/sigma))
    out = (-data.k2 * x * g, data.k1 * x * g, -data.k2 * dg, data.k1 * dg)
    if x.ndim == 0:
        return tuple(float(v) for v in out)
    return out


def sample_gradients(data: GaussianData, domain: Domain | None = None, count: int = DEFAULT_SAMPLES) -> GradState:
    """Pointwise gradient data on a uniform grid plus the profile's stationary points."""
    if domain is None:
        domain = Domain.for_profile(data, count - 1)
    x = np.union1d(np.linspace(-domain.d, domain.d, count), data.extremum_points())
    _, _, q0, s0 = eval_profile(data, x)
    return GradState(q=q0, s=s0)


def dimensionless_nu(p: PlasmaParams) -> Nu:
    """Electron-ion collision frequency in units of the plasma frequency."""
    return Nu(p.Z * math.sqrt(8.0) / 3.0 * p.eta**1.5 * p.ln_Lambda)


def a_star_from_laser(p: PlasmaParams) -> float:
    """Wake field strength scale excited by a Gaussian laser pulse."""
    return math.sqrt(p.a0**2 * p.tau_star * math.sqrt(math.pi / 2.0) * math.exp(-p.tau_star**2 / 8.0))
