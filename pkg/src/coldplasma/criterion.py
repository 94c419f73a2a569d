"""Smooth-versus-blow-up classification of initial gradient data.

A point (s0, q0) of initial gradients leads to a finite-time singularity
along its characteristic exactly when F, the linearising function from
:mod:`coldplasma.analytic`, reaches zero for some t > 0. Because F has closed
form extrema, the sign of F at its first positive minimum decides the
question without any time stepping.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .analytic import (
    GradState,
    Nu,
    NuLike,
    Regime,
    as_nu,
    eval_FG,
    f_minimum_time,
    f_minimum_value,
    regime,
)
from .errors import NoRoot


class Region(enum.Enum):
    SMOOTH = "smooth"
    BLOWUP = "blowup"


@dataclass(frozen=True)
class Classification:
    region: Region
    breaking_time: Optional[float] = None

    @property
    def blowup(self) -> bool:
        return self.region is Region.BLOWUP


@dataclass(frozen=True)
class CriticalAmplitude:
    k_cr: float
    t_break_at_threshold: float


#: F-minimum values this close to zero (relative to the size of the data) are
#: treated as tangent to zero, i.e. as lying on the separatrix.
TANGENCY_ULPS = 16


def _snap(fmin, s0, q0):
    scale = 1.0 + np.abs(s0) + np.abs(q0)
    tol = TANGENCY_ULPS * np.finfo(float).eps * scale
    return np.where(np.abs(fmin) <= tol, 0.0, fmin)


def _check_physical(s0) -> None:
    if np.any(np.asarray(s0, float) >= 1.0):
        raise ValueError("s0 must be < 1 (electron density 1 - s0 must stay positive)")


def _f_of_t(nu: Nu, s0: float, q0: float):
    """Scalar F(t) for root finding, using math instead of numpy ufuncs."""
    v = nu.value
    half = 0.5 * v
    a = q0 + half * s0
    base = 1.0 - s0
    reg = regime(nu)
    if reg is Regime.UNDAMPED:
        return lambda t: base + s0 * math.cos(t) + a * math.sin(t)
    if reg is Regime.CRITICAL:
        return lambda t: base + (s0 + a * t) * math.exp(-half * t)
    if reg is Regime.UNDERDAMPED:
        w = nu.omega
        return lambda t: base + (s0 * math.cos(w * t) + a * math.sin(w * t) / w) * math.exp(-half * t)
    w1 = nu.omega1
    zp, zm = nu.z_pm

    def f(t):
        ep = math.exp(zp * t)
        c = 0.5 * (ep + math.exp(zm * t))
        s = -ep * math.expm1(-2.0 * w1 * t) / (2.0 * w1)
        return base + s0 * c + a * s

    return f


def min_time_of_F(nu: NuLike, init: GradState) -> Optional[float]:
    """Time of the first positive local minimum of F, or None if F has none.

    None means F increases or decays monotonically to 1 - s0 > 0 and the
    characteristic stays smooth for all time.
    """
    tm = float(f_minimum_time(nu, init.s, init.q))
    return None if math.isnan(tm) else tm


def phi(nu: NuLike, s0, q0):
    """Separatrix function: F at its first positive minimum.

    ``phi <= 0`` exactly on the blow-up region (the separatrix itself
    included). Where F has no positive minimum the value is ``+inf``.
    """
    _check_physical(s0)
    out = _snap(f_minimum_value(nu, s0, q0), np.asarray(s0, float), np.asarray(q0, float))
    return float(out) if np.ndim(out) == 0 else out


def classify(nu: NuLike, init: GradState) -> Classification:
    """Classify one point of initial gradient data and find its breaking time."""
    nu = as_nu(nu)
    s0, q0 = float(init.s), float(init.q)
    _check_physical(s0)
    tm = min_time_of_F(nu, init)
    if tm is None:
        return Classification(Region.SMOOTH)
    f = _f_of_t(nu, s0, q0)
    fmin = float(_snap(f(tm), s0, q0))
    if fmin > 0.0:
        return Classification(Region.SMOOTH)
    if fmin == 0.0:
        return Classification(Region.BLOWUP, tm)
    # F(0) = 1 and F is positive up to the last maximum before tm, then
    # strictly decreasing, so [0, tm] brackets exactly one root.
    root = brentq(f, 0.0, tm, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    return Classification(Region.BLOWUP, root)


def _as_arrays(samples) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(samples, GradState):
        return np.atleast_1d(np.asarray(samples.s, float)), np.atleast_1d(np.asarray(samples.q, float))
    samples = list(samples)
    s0 = np.array([g.s for g in samples], dtype=float)
    q0 = np.array([g.q for g in samples], dtype=float)
    return s0, q0


def breaking_times(nu: NuLike, s0, q0, iterations: int = 80) -> np.ndarray:
    """Vectorised first zero of F for many points; NaN where the point is smooth.

    Uses bisection on [0, t_min] for every blow-up point simultaneously.
    """
    nu = as_nu(nu)
    s0, q0 = np.broadcast_arrays(np.asarray(s0, float), np.asarray(q0, float))
    _check_physical(s0)
    tm = f_minimum_time(nu, s0, q0)
    hit = phi(nu, s0, q0) <= 0.0
    out = np.full(s0.shape, np.nan)
    if not np.any(hit):
        return out
    s, q, hi = s0[hit], q0[hit], tm[hit]
    lo = np.zeros_like(hi)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        above = np.asarray(eval_FG(nu, GradState(q=q, s=s), mid).F) > 0.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    out[hit] = hi
    return out


def breaking_time_field(nu: NuLike, samples: Iterable[GradState] | GradState) -> Optional[float]:
    """Earliest breaking time over a set of sampled initial gradients.

    ``samples`` is either a sequence of scalar GradState or one GradState
    holding arrays. Returns None when every sample is globally smooth.
    """
    s0, q0 = _as_arrays(samples)
    if s0.size == 0:
        return None
    times = np.atleast_1d(breaking_times(nu, s0, q0))
    if np.all(np.isnan(times)):
        return None
    i = int(np.nanargmin(times))
    # polish the winning point with the scalar bracketed solver
    return classify(nu, GradState(q=q0[i], s=s0[i])).breaking_time


def k_cr_underdamped(nu: NuLike) -> CriticalAmplitude:
    """Critical field amplitude for data with zero initial velocity, 0 <= nu < 2."""
    v = as_nu(nu).value
    if v >= 2.0:
        raise ValueError("k_cr_underdamped requires 0 <= nu < 2")
    root = math.sqrt(4.0 - v * v)
    return CriticalAmplitude(
        k_cr=1.0 / (1.0 + math.exp(-v * math.pi / root)),
        t_break_at_threshold=2.0 * math.pi / root,
    )


def k_cr_overdamped(nu: NuLike) -> CriticalAmplitude:
    """Critical velocity amplitude for data with zero initial field, nu > 2."""
    v = as_nu(nu).value
    if v <= 2.0:
        raise ValueError("k_cr_overdamped requires nu > 2")
    root = math.sqrt(v * v - 4.0)
    zp = 0.5 * (-v + root)
    zm = 0.5 * (-v - root)
    m = math.log((v * root + v * v - 2.0) / 2.0) / root
    return CriticalAmplitude(k_cr=root / (math.exp(zp * m) - math.exp(zm * m)), t_break_at_threshold=m)


def density_lower_bound(nu: NuLike) -> float:
    """Lower bound on the electron density of any globally smooth solution."""
    v = as_nu(nu).value
    if v >= 2.0:
        return 0.0
    e = math.exp(-v * math.pi / math.sqrt(4.0 - v * v))
    return e / (1.0 + e)


def separatrix_s0(nu: NuLike, q0: float, s_floor: float = -1e6) -> float:
    """The s0 with phi(nu, s0, q0) = 0 for one q0.

    Raises NoRoot when no sign change of phi exists on (s_floor, 1).
    """
    nu = as_nu(nu)
    hi = 1.0 - 1e-12
    if phi(nu, hi, q0) > 0.0:
        raise NoRoot(f"no blow-up data with q0={q0!r} below s0 = 1 at nu={nu.value}")
    lo = min(-1.0, -abs(q0))
    while phi(nu, lo, q0) <= 0.0:
        lo *= 2.0
        if lo < s_floor:
            raise NoRoot(f"separatrix not found above s0={s_floor} for q0={q0!r}")
    # plain bisection: phi jumps to +inf where F loses its minimum, which
    # secant steps do not tolerate
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return hi
        if phi(nu, mid, q0) > 0.0:
            lo = mid
        else:
            hi = mid


def sample_separatrix(
    nu: NuLike,
    q_range: tuple[float, float],
    count: int,
    skip_missing: bool = False,
) -> list[tuple[float, float]]:
    """Trace the curve phi = 0 as (s0, q0) pairs over an even grid of q0.

    With ``skip_missing`` the q0 values where the curve does not exist are
    dropped instead of raising NoRoot.
    """
    if count < 2:
        raise ValueError("count must be at least 2")
    nu = as_nu(nu)
    out = []
    for q0 in np.linspace(q_range[0], q_range[1], count):
        try:
            out.append((separatrix_s0(nu, float(q0)), float(q0)))
        except NoRoot:
            if not skip_missing:
                raise
    return out


def classify_many(nu: NuLike, init: Sequence[GradState]) -> list[Classification]:
    return [classify(nu, g) for g in init]
