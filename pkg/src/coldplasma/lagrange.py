"""Characteristics solver.

Each electron follows dx/dt = V. Because dE/dt = V along the same path, the
trajectory integrates in closed form:

    x(t) = x0 + E(t) - E0,

in every collision regime, with E(t) the damped-oscillator solution from
:mod:`coldplasma.analytic`. The Jacobian dx/dx0 = 1 - s0 + (E - E0)_x0 is
exactly F, so trajectories of neighbouring electrons meet when F vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .analytic import CharState, GradState, Nu, NuLike, as_nu, eval_FG, eval_VE
from .errors import CrossingBeforeT
from .euler import GridField
from .profiles import Domain, GaussianData, eval_profile

#: Bisection tolerance for the crossing time.
CROSSING_TOL = 1e-10


@dataclass(frozen=True)
class Characteristic:
    """One electron trajectory sampled at the times ``t``.

    ``q`` and ``s`` are NaN from the first zero of F onward.
    """

    x0: float
    nu: Nu
    init: CharState
    grad0: GradState
    t: np.ndarray
    x: np.ndarray
    V: np.ndarray
    E: np.ndarray
    q: np.ndarray
    s: np.ndarray
    F: np.ndarray

    def position(self, t) -> np.ndarray:
        E = np.asarray(eval_VE(self.nu, self.init, t).E)
        return self.x0 + E - self.init.E

    def density(self) -> np.ndarray:
        """N = (1 - s0)/F, the electron density carried by this electron."""
        return 1.0 - self.s


def _gradients(nu: Nu, grad0: GradState, t: np.ndarray):
    fg = eval_FG(nu, grad0, t)
    F = np.asarray(fg.F, float)
    # F is positive up to its first zero; mask everything from there on
    alive = np.cumprod(F > 0.0).astype(bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(alive, np.asarray(fg.G) / F, np.nan)
        s = np.where(alive, 1.0 - (1.0 - grad0.s) / F, np.nan)
    return q, s, F


def advect(x0: float, data: GaussianData, nu: NuLike, t) -> Characteristic:
    """Trajectory launched at ``x0`` together with the values it carries."""
    nu = as_nu(nu)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    V0, E0, q0, s0 = eval_profile(data, float(x0))
    init = CharState(V=V0, E=E0)
    grad0 = GradState(q=q0, s=s0)
    st = eval_VE(nu, init, t)
    E = np.asarray(st.E, float)
    q, s, F = _gradients(nu, grad0, t)
    return Characteristic(
        x0=float(x0),
        nu=nu,
        init=init,
        grad0=grad0,
        t=t,
        x=x0 + E - E0,
        V=np.asarray(st.V, float),
        E=E,
        q=q,
        s=s,
        F=F,
    )


def launch_fan(data: GaussianData, nu: NuLike, x0s: Sequence[float], times) -> list[Characteristic]:
    x0s = np.asarray(x0s, dtype=float)
    if np.any(np.diff(x0s) <= 0.0):
        raise ValueError("launch points must be strictly increasing")
    return [advect(x, data, nu, times) for x in x0s]


def _fan_arrays(fan: Sequence[Characteristic]):
    x0 = np.array([c.x0 for c in fan])
    V0 = np.array([c.init.V for c in fan])
    E0 = np.array([c.init.E for c in fan])
    return x0, CharState(V=V0, E=E0)


def _gaps(nu: Nu, x0, init: CharState, t) -> np.ndarray:
    E = np.asarray(eval_VE(nu, init, t).E)
    return np.diff(x0 + E - init.E)


def detect_crossing(fan: Sequence[Characteristic], tol: float = CROSSING_TOL) -> Optional[float]:
    """Earliest time two neighbouring trajectories meet, or None.

    The sampled times of the fan locate the first step with a non-positive
    gap between adjacent trajectories; bisection then refines every
    offending pair and the earliest refined time is returned.
    """
    if len(fan) < 2:
        return None
    x0, init = _fan_arrays(fan)
    if np.any(np.diff(x0) <= 0.0):
        raise ValueError("launch points must be strictly increasing")
    nu = fan[0].nu
    t = fan[0].t
    X = np.stack([c.x for c in fan])  # (n_char, n_t)
    bad = np.diff(X, axis=0) <= 0.0
    hit = np.flatnonzero(np.any(bad, axis=0))
    if hit.size == 0:
        return None
    j = int(hit[0])
    if j == 0:
        return float(t[0])
    lo_t, hi_t = float(t[j - 1]), float(t[j])
    # a pair may dip below zero and recover inside one step; bisect every
    # pair that is crossed at the first offending sample
    pairs = np.flatnonzero(bad[:, j])
    sub = CharState(V=np.stack([init.V[pairs], init.V[pairs + 1]]), E=np.stack([init.E[pairs], init.E[pairs + 1]]))
    x0p = np.stack([x0[pairs], x0[pairs + 1]])
    lo = np.full(pairs.size, lo_t)
    hi = np.full(pairs.size, hi_t)
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        E = np.asarray(eval_VE(nu, sub, mid).E)
        gap = (x0p[1] + E[1] - sub.E[1]) - (x0p[0] + E[0] - sub.E[0])
        ok = gap > 0.0
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return float(np.min(hi))


def reconstruct(fan: Sequence[Characteristic], t: float, grid: Domain) -> GridField:
    """Interpolate the fan at time ``t`` onto the nodes of ``grid``.

    Nodes outside the envelope of the fan, and the two boundary nodes, are 0.
    """
    x0, init = _fan_arrays(fan)
    nu = fan[0].nu
    st = eval_VE(nu, init, t)
    E = np.asarray(st.E, float)
    V = np.asarray(st.V, float)
    x = x0 + E - init.E
    if np.any(np.diff(x) <= 0.0):
        raise CrossingBeforeT(f"trajectories have crossed before t={t:g}")
    nodes = grid.nodes
    inside = (nodes >= x[0]) & (nodes <= x[-1])
    Vg = np.zeros_like(nodes)
    Eg = np.zeros_like(nodes)
    Vg[inside] = PchipInterpolator(x, V)(nodes[inside])
    Eg[inside] = PchipInterpolator(x, E)(nodes[inside])
    Vg[0] = Vg[-1] = Eg[0] = Eg[-1] = 0.0
    return GridField(V=Vg, E=Eg, domain=grid, t=float(t))


def exact_fields(data: GaussianData, nu: NuLike, t: float, x, iterations: int = 100):
    """Exact Eulerian V, E and N at positions ``x`` and time ``t``.

    Inverts x = x0 + E(t; x0) - E0(x0) for the launch point by a safeguarded
    Newton iteration (the derivative in x0 is F). Valid before breaking only.
    Returns (V, E, N).
    """
    nu = as_nu(nu)
    x = np.asarray(x, dtype=float)

    def trace(x0):
        V0, E0, q0, s0 = eval_profile(data, x0)
        st = eval_VE(nu, CharState(V=V0, E=E0), t)
        fg = eval_FG(nu, GradState(q=q0, s=s0), t)
        E = np.asarray(st.E)
        return x0 + E - E0, np.asarray(st.V), E, np.asarray(fg.F), s0

    # |x - x0| <= |E| + |E0|, and E^2 + V^2 never grows along a path
    V0, E0, _, _ = eval_profile(data, x)
    amp = float(np.max(np.sqrt(np.asarray(V0) ** 2 + np.asarray(E0) ** 2), initial=0.0))
    span = 2.0 * max(amp, 2.0 * data.e_max, 2.0 * abs(data.k2) * np.sqrt(data.sigma / 2.0)) + 1e-12
    lo = x - span
    hi = x + span
    x0 = x.copy()
    for _ in range(iterations):
        pos, _, _, F, _ = trace(x0)
        r = pos - x
        lo = np.where(r < 0.0, x0, lo)
        hi = np.where(r > 0.0, x0, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = x0 - r / F
        bad = ~np.isfinite(nxt) | (nxt <= lo) | (nxt >= hi) | (F <= 0.0)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = np.max(np.abs(nxt - x0), initial=0.0) <= 1e-15 * (1.0 + np.max(np.abs(x), initial=0.0))
        x0 = nxt
        if done:
            break
    _, V, E, F, s0 = trace(x0)
    if np.any(F <= 0.0):
        raise CrossingBeforeT(f"the exact solution has broken before t={t:g}")
    return V, E, (1.0 - s0) / F
