"""Closed-form solutions along characteristics.

Along a characteristic ``dx/dt = V`` the field pair obeys

    dV/dt = -E - nu*V,      dE/dt = V,

and the gradients ``q = V_x``, ``s = E_x`` obey

    dq/dt = -s - q**2 - nu*q,      ds/dt = q*(1 - s).

The second system linearises through ``q = G/F`` where ``F`` solves the same
damped oscillator as ``E`` (shifted by the constant ``1 - s0``) and ``G = F'``.
Everything here is expressed through one damped-oscillator kernel so that the
four collision regimes share a single code path.

All functions broadcast over numpy arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import BlowupCrossed

#: Width of the band around nu = 2 treated with the critical-regime limit.
CRITICAL_BAND = 1e-9


class Regime(enum.Enum):
    UNDAMPED = "undamped"
    UNDERDAMPED = "underdamped"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"


@dataclass(frozen=True)
class Nu:
    """Dimensionless electron-ion collision frequency."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0.0:
            raise ValueError(f"collision frequency must be a finite non-negative number, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def regime(self) -> Regime:
        return regime(self)

    @property
    def omega(self) -> float:
        """Oscillation frequency sqrt(4 - nu^2)/2 (regimes with nu < 2)."""
        if self.value >= 2.0:
            raise ValueError("omega is only defined for nu < 2")
        return 0.5 * math.sqrt(4.0 - self.value**2)

    @property
    def omega1(self) -> float:
        """Hyperbolic rate sqrt(nu^2 - 4)/2 (nu > 2)."""
        if self.value <= 2.0:
            raise ValueError("omega1 is only defined for nu > 2")
        return 0.5 * math.sqrt(self.value**2 - 4.0)

    @property
    def z(self) -> float:
        """nu + sqrt(nu^2 - 4) (nu >= 2)."""
        if self.value < 2.0:
            raise ValueError("z is only defined for nu >= 2")
        return self.value + math.sqrt(self.value**2 - 4.0)

    @property
    def z_pm(self) -> tuple[float, float]:
        """Characteristic exponents (-nu +/- sqrt(nu^2 - 4))/2 (nu >= 2)."""
        if self.value < 2.0:
            raise ValueError("z_pm is only defined for nu >= 2")
        r = math.sqrt(self.value**2 - 4.0)
        return 0.5 * (-self.value + r), 0.5 * (-self.value - r)


NuLike = Union[Nu, float, int]


def as_nu(nu: NuLike) -> Nu:
    return nu if isinstance(nu, Nu) else Nu(nu)


def regime(nu: NuLike) -> Regime:
    """Split nu into the four qualitative regimes at nu = 0 and nu = 2.

    A band of half-width ``CRITICAL_BAND`` around 2 is reported as critical;
    inside it the hyperbolic and trigonometric forms lose accuracy and the
    polynomial limit is used instead.
    """
    v = as_nu(nu).value
    if v == 0.0:
        return Regime.UNDAMPED
    if abs(v - 2.0) < CRITICAL_BAND:
        return Regime.CRITICAL
    return Regime.UNDERDAMPED if v < 2.0 else Regime.OVERDAMPED


@dataclass(frozen=True)
class CharState:
    """Velocity and field carried along a characteristic."""

    V: float | np.ndarray
    E: float | np.ndarray


@dataclass(frozen=True)
class GradState:
    """Spatial derivatives q = V_x and s = E_x along a characteristic."""

    q: float | np.ndarray
    s: float | np.ndarray

    @property
    def density(self):
        return 1.0 - np.asarray(self.s)


@dataclass(frozen=True)
class FGPair:
    F: float | np.ndarray
    G: float | np.ndarray
    t: float | np.ndarray


def _check_time(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < 0.0):
        raise ValueError("time must be finite and non-negative")
    return t


def _kernel(nu: Nu, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fundamental solutions of y'' + nu*y' + y = 0.

    Returns ``(c, s)`` with c(0) = 1, c'(0) = -nu/2, s(0) = 0, s'(0) = 1, i.e.
    ``c = C(t)exp(-nu t/2)`` and ``s = S(t)exp(-nu t/2)`` where C is cos/1/cosh
    and S is sin(wt)/w, t, sinh(wt)/w depending on the regime.
    """
    v = nu.value
    reg = regime(nu)
    if reg is Regime.UNDAMPED:
        return np.cos(t), np.sin(t)
    if reg is Regime.CRITICAL:
        decay = np.exp(-0.5 * v * t)
        return decay, t * decay
    if reg is Regime.UNDERDAMPED:
        w = nu.omega
        decay = np.exp(-0.5 * v * t)
        return np.cos(w * t) * decay, np.sin(w * t) / w * decay
    # overdamped: combine exponents so that cosh/sinh never overflow
    w1 = nu.omega1
    zp, zm = nu.z_pm
    ep = np.exp(zp * t)
    c = 0.5 * (ep + np.exp(zm * t))
    s = -ep * np.expm1(-2.0 * w1 * t) / (2.0 * w1)
    return c, s


def _oscillate(nu: Nu, y0, dy0, t) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative of the damped oscillator with y(0)=y0, y'(0)=dy0."""
    c, s = _kernel(nu, t)
    half = 0.5 * nu.value
    y = y0 * c + (dy0 + half * y0) * s
    dy = dy0 * c - (y0 + half * dy0) * s
    return y, dy


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def eval_VE(nu: NuLike, init: CharState, t) -> CharState:
    """Velocity and field at time ``t`` along a characteristic."""
    nu = as_nu(nu)
    t = _check_time(t)
    E, V = _oscillate(nu, np.asarray(init.E, float), np.asarray(init.V, float), t)
    return CharState(V=_out(V), E=_out(E))


def eval_FG(nu: NuLike, init: GradState, t) -> FGPair:
    """The linearising pair (F, G) with q = G/F and G = dF/dt.

    F(0) = 1 and G(0) = q0 in every regime; F reaching zero is exactly the
    blow-up of the gradients.
    """
    nu = as_nu(nu)
    t = _check_time(t)
    s0 = np.asarray(init.s, float)
    q0 = np.asarray(init.q, float)
    y, dy = _oscillate(nu, s0, q0, t)
    return FGPair(F=_out(1.0 - s0 + y), G=_out(dy), t=_out(t))


def f_minimum_time(nu: NuLike, s0, q0) -> np.ndarray:
    """First strictly positive local minimum of F, NaN where none exists.

    For nu < 2 the minima of F decrease in depth with time (the oscillating
    part is damped), so the first one is also the lowest on t > 0. For nu >= 2
    F has at most one positive extremum.
    """
    nu = as_nu(nu)
    v = nu.value
    s0, q0 = np.broadcast_arrays(np.asarray(s0, float), np.asarray(q0, float))
    b = 0.5 * v * q0 + s0  # F' = q0*c - b*s
    reg = regime(nu)
    with np.errstate(divide="ignore", invalid="ignore"):
        if reg in (Regime.UNDAMPED, Regime.UNDERDAMPED):
            w = 1.0 if reg is Regime.UNDAMPED else nu.omega
            # F' is proportional to R*cos(w t + phi); minima of F sit where
            # w t + phi = 3pi/2 (mod 2pi).
            phi = np.arctan2(b / w, q0)
            theta = np.mod(1.5 * np.pi - phi, 2.0 * np.pi)
            theta = np.where(theta <= 0.0, 2.0 * np.pi, theta)
            out = theta / w
            out = np.where((s0 == 0.0) & (q0 == 0.0), np.nan, out)
        elif reg is Regime.CRITICAL:
            # F' = (q0 - b t) exp(-t) with b = s0 + q0 at nu = 2: a minimum
            # iff b < 0, and it is positive iff q0 < 0
            out = np.where((b < 0.0) & (q0 < 0.0), q0 / b, np.nan)
        else:
            # F' proportional to q0 cosh(w1 t) - (b/w1) sinh(w1 t)
            w1 = nu.omega1
            r = w1 * q0 / b
            ok = (b < 0.0) & (q0 < 0.0) & (r < 1.0)
            out = np.where(ok, np.arctanh(np.where(ok, r, 0.0)) / w1, np.nan)
    return out if out.ndim else np.float64(out)


def f_minimum_value(nu: NuLike, s0, q0) -> np.ndarray:
    """F at its first positive minimum; +inf where F has no positive minimum."""
    nu = as_nu(nu)
    tm = f_minimum_time(nu, s0, q0)
    safe = np.where(np.isnan(tm), 0.0, tm)
    y, _ = _oscillate(nu, np.asarray(s0, float), np.asarray(q0, float), safe)
    val = 1.0 - np.asarray(s0, float) + y
    return np.where(np.isnan(tm), np.inf, val)


def eval_qs(nu: NuLike, init: GradState, t) -> GradState:
    """Gradients at time ``t`` from q = G/F and (1 - s) F = 1 - s0.

    Raises ``BlowupCrossed`` if F vanishes anywhere on (0, t].
    """
    nu = as_nu(nu)
    t = _check_time(t)
    s0 = np.asarray(init.s, float)
    q0 = np.asarray(init.q, float)
    fg = eval_FG(nu, init, t)
    F = np.asarray(fg.F)
    tm = f_minimum_time(nu, s0, q0)
    fmin = f_minimum_value(nu, s0, q0)
    reached = np.where(np.isnan(tm), np.inf, tm) <= t
    if np.any(F <= 0.0) or np.any(reached & (fmin <= 0.0)):
        raise BlowupCrossed("F vanishes before the requested time; the gradients have blown up")
    q = np.asarray(fg.G) / F
    s = 1.0 - (1.0 - s0) / F
    return GradState(q=_out(q), s=_out(s))
