"""McCormack predictor-corrector solver for the Eulerian system

    V_t + (V^2/2)_x = -E - nu V,
    E_t + V E_x     = V,

on [-d, d] with V = E = 0 at both ends. The electron density is recovered
from the field through N = 1 - E_x.

The predictor uses forward differences and the corrector backward ones;
source terms enter both stages. Breaking is detected at run time from the
discrete gradients and the density.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .analytic import NuLike, as_nu
from .errors import CflViolation
from .profiles import Domain, GaussianData, eval_profile

log = logging.getLogger(__name__)

DEFAULT_CFL = 0.9
#: Default time step as a fraction of the mesh step.
DEFAULT_TAU_RATIO = 0.5


@dataclass(frozen=True)
class GridField:
    V: np.ndarray
    E: np.ndarray
    domain: Domain
    t: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        n = self.domain.n_cells + 1
        if self.V.shape != (n,) or self.E.shape != (n,):
            raise ValueError(f"V and E must have {n} nodes")

    @property
    def x(self) -> np.ndarray:
        return self.domain.nodes


@dataclass(frozen=True)
class Detection:
    """Thresholds that declare the discrete solution broken.

    ``g_max`` bounds |V_x| and |E_x| and ``n_min``/``n_max`` bound the
    density. On practical grids the discrete gradient of a breaking profile
    saturates long before ``g_max``: at the breaking time the field has a
    cube-root profile and the mesh resolves gradients only up to about
    (scale/h)**(2/3). The gradient limit is therefore lowered to
    ``resolution * sqrt(scale/h)``, which stays resolvable as h -> 0 and
    reverts to ``g_max`` in the limit. ``scale`` is the profile width rho_*.
    Set ``resolution`` to ``math.inf`` to keep only the absolute limits.
    """

    g_max: float = 1e4
    n_min: float = 1e-6
    n_max: float = 1e6
    resolution: float = 1.0

    def gradient_limit(self, h: float, scale: float = 1.0) -> float:
        return min(self.g_max, self.resolution * (scale / h) ** 0.5)


class Status(enum.Enum):
    COMPLETED_SMOOTH = "completed_smooth"
    BROKE_DOWN = "broke_down"


@dataclass
class RunOutcome:
    status: Status
    t_break: float | None
    times: np.ndarray
    max_abs_grad_history: np.ndarray
    density_min_history: np.ndarray
    density_max_history: np.ndarray
    center_density_history: np.ndarray
    center_slope_history: np.ndarray
    final: GridField
    snapshots: dict[float, GridField] = field(default_factory=dict)

    @property
    def broke(self) -> bool:
        return self.status is Status.BROKE_DOWN


def initial_field(data: GaussianData, domain: Domain) -> GridField:
    V, E, _, _ = eval_profile(data, domain.nodes)
    V = np.array(V, dtype=float)
    E = np.array(E, dtype=float)
    V[0] = V[-1] = E[0] = E[-1] = 0.0
    return GridField(V=V, E=E, domain=domain)


def max_stable_tau(state: GridField, cfl: float = DEFAULT_CFL) -> float:
    vmax = float(np.max(np.abs(state.V)))
    return np.inf if vmax == 0.0 else cfl * state.domain.h / vmax


def step(state: GridField, nu: NuLike, tau: float, cfl: float = DEFAULT_CFL) -> GridField:
    """Advance one McCormack step of length ``tau``."""
    nu = as_nu(nu).value
    h = state.domain.h
    V, E = state.V, state.E
    if tau <= 0.0:
        raise ValueError("time step must be positive")
    if tau * float(np.max(np.abs(V))) / h > cfl:
        raise CflViolation(f"tau={tau:g} exceeds the Courant limit {cfl} on h={h:g}")
    if V[0] != 0.0 or V[-1] != 0.0 or E[0] != 0.0 or E[-1] != 0.0:
        raise ValueError("boundary values must be zero")
    r = tau / h

    f = 0.5 * V * V
    Vp = np.zeros_like(V)
    Ep = np.zeros_like(E)
    Vp[1:-1] = V[1:-1] - r * (f[2:] - f[1:-1]) - tau * (E[1:-1] + nu * V[1:-1])
    Ep[1:-1] = E[1:-1] - r * V[1:-1] * (E[2:] - E[1:-1]) + tau * V[1:-1]

    fp = 0.5 * Vp * Vp
    Vn = np.zeros_like(V)
    En = np.zeros_like(E)
    Vn[1:-1] = 0.5 * (V[1:-1] + Vp[1:-1] - r * (fp[1:-1] - fp[:-2]) - tau * (Ep[1:-1] + nu * Vp[1:-1]))
    En[1:-1] = 0.5 * (E[1:-1] + Ep[1:-1] - r * Vp[1:-1] * (Ep[1:-1] - Ep[:-2]) + tau * Vp[1:-1])
    return replace(state, V=Vn, E=En, t=state.t + tau, tau=tau)


def density(state: GridField) -> np.ndarray:
    """N = 1 - E_x, second order everywhere (one-sided at the ends)."""
    return 1.0 - np.gradient(state.E, state.domain.h, edge_order=2)


def run(
    data: GaussianData,
    nu: NuLike,
    horizon: float,
    n_cells: int = 2048,
    tau: float | None = None,
    cfl: float = DEFAULT_CFL,
    detection: Detection = Detection(),
    domain: Domain | None = None,
    snapshot_times: Sequence[float] = (),
) -> RunOutcome:
    """Integrate from the Gaussian profile until ``horizon`` or breaking.

    The time step is ``tau`` (default half the mesh step), shortened when
    needed to respect the CFL limit and to land exactly on snapshot times
    and the horizon. On breaking, ``t_break`` is the midpoint of the last
    step and ``final`` holds the last state that passed detection.
    """
    if not horizon > 0.0:
        raise ValueError("horizon must be positive")
    nu = as_nu(nu)
    if domain is None:
        domain = Domain.for_profile(data, n_cells)
    h = domain.h
    if tau is None:
        tau = DEFAULT_TAU_RATIO * h
    if not tau > 0.0:
        raise ValueError("tau must be positive")
    wanted = {float(s) for s in snapshot_times if 0.0 <= s <= horizon}
    stops = sorted(wanted | {float(horizon)})

    state = initial_field(data, domain)
    center = int(np.argmin(np.abs(domain.nodes)))
    times, grads, nmin, nmax, ncen, scen = [], [], [], [], [], []
    snapshots: dict[float, GridField] = {}

    g_lim = detection.gradient_limit(h, data.rho_star)

    def record(st: GridField):
        vx = np.gradient(st.V, h, edge_order=2)
        ex = np.gradient(st.E, h, edge_order=2)
        n = 1.0 - ex
        g = max(float(np.max(np.abs(vx))), float(np.max(np.abs(ex))))
        times.append(st.t)
        grads.append(g)
        nmin.append(float(np.min(n)))
        nmax.append(float(np.max(n)))
        ncen.append(float(n[center]))
        scen.append(float(ex[center]))
        finite = np.all(np.isfinite(st.V)) and np.all(np.isfinite(st.E))
        in_band = detection.n_min <= nmin[-1] and nmax[-1] <= detection.n_max
        return not (finite and g <= g_lim and in_band)

    def outcome(status, t_break, final):
        return RunOutcome(
            status=status,
            t_break=t_break,
            times=np.array(times),
            max_abs_grad_history=np.array(grads),
            density_min_history=np.array(nmin),
            density_max_history=np.array(nmax),
            center_density_history=np.array(ncen),
            center_slope_history=np.array(scen),
            final=final,
            snapshots=snapshots,
        )

    if record(state):
        raise ValueError("initial data already violates the detection thresholds")
    if 0.0 in wanted:
        snapshots[0.0] = state
    for stop in stops:
        if stop == 0.0:
            continue
        while state.t < stop:
            dt = min(tau, max_stable_tau(state, cfl), stop - state.t)
            if stop - (state.t + dt) < 1e-12 * max(1.0, stop):
                dt = stop - state.t
            with np.errstate(all="ignore"):
                new = step(state, nu, dt, cfl)
            if stop - new.t <= 1e-12 * max(1.0, stop):
                new = replace(new, t=stop)
            if record(new):
                t_break = 0.5 * (state.t + new.t)
                log.info("breaking detected at t=%.6g", t_break)
                return outcome(Status.BROKE_DOWN, t_break, state)
            state = new
        if stop in wanted:
            snapshots[stop] = state
    return outcome(Status.COMPLETED_SMOOTH, None, state)
