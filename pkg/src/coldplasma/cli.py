"""Command-line front end.

Parameters come from an optional ``key=value`` file (``--config``) and are
overridden by command-line flags. Results are written as comma-separated
text with a header line, to ``--out`` or standard output.

Exit status: 0 on success, 1 for an invalid configuration, 2 when a solver
fails numerically.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Sequence

import numpy as np

from . import criterion, euler, lagrange
from .analytic import GradState
from .errors import ColdPlasmaError, NoRoot
from .profiles import Domain, GaussianData

log = logging.getLogger("coldplasma")

MODES = (
    "classify",
    "separatrix",
    "simulate-euler",
    "simulate-lagrange",
    "compare",
    "figure2",
    "figure3",
    "figure4",
    "figure5",
)

FIG2_NUS = (0.0, 0.2, 2.2)
FIG2_K = 0.4761
FIG2_HORIZON = 25.0
FIG2_CELLS = 4096
FIG3_NUS = (0.0, 0.2)
FIG3_K = (0.5, 0.999)
FIG3_COUNT = 200
FIG_FAN = 4097


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str = "classify"
    nu: float = 0.0
    k1: float = 0.0
    k2: float = 0.0
    rho_star: float = 1.0
    cells: int = 2048
    tau: float | None = None
    cfl: float = euler.DEFAULT_CFL
    horizon: float = 10.0
    gmax: float = 1e4
    out: str | None = None
    s0: float = 0.0
    q0: float = 0.0
    q_min: float = -2.0
    q_max: float = 2.0
    count: int = 201
    verbose: bool = False

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        finite = ("nu", "k1", "k2", "rho_star", "cfl", "horizon", "gmax", "s0", "q0", "q_min", "q_max")
        for name in finite:
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.nu < 0:
            raise ConfigError("nu must be non-negative")
        if self.rho_star <= 0:
            raise ConfigError("rho-star must be positive")
        if self.cells < 2:
            raise ConfigError("cells must be at least 2")
        if self.tau is not None and not (self.tau > 0 and math.isfinite(self.tau)):
            raise ConfigError("tau must be positive")
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl must lie in (0, 1]")
        if self.horizon <= 0:
            raise ConfigError("horizon must be positive")
        if self.gmax <= 0:
            raise ConfigError("gmax must be positive")
        if self.s0 >= 1:
            raise ConfigError("s0 must be < 1")
        if self.q_min > self.q_max:
            raise ConfigError("q-min must not exceed q-max")
        if self.count < 2:
            raise ConfigError("count must be at least 2")

    @property
    def data(self) -> GaussianData:
        return GaussianData(k1=self.k1, k2=self.k2, rho_star=self.rho_star)

    @property
    def detection(self) -> euler.Detection:
        return euler.Detection(g_max=self.gmax)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(name: str, raw: str):
    kind = _TYPES[name]
    try:
        if kind == "str":
            return raw
        if kind == "str | None":
            return raw or None
        if kind == "bool":
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if kind == "int":
            return int(raw)
        if kind == "float | None":
            return None if raw.lower() in ("", "none") else float(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def read_config(path: str) -> dict:
    """Parse a ``key=value`` file; blank lines and ``#`` comments are ignored."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coldplasma", description="Cold-plasma oscillations with collisions: blow-up criteria and solvers.")
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--nu", type=float, help="collision frequency (units of the plasma frequency)")
    p.add_argument("--k1", type=float, help="field amplitude of the Gaussian profile")
    p.add_argument("--k2", type=float, help="velocity amplitude of the Gaussian profile")
    p.add_argument("--rho-star", dest="rho_star", type=float, help="localisation scale")
    p.add_argument("--cells", type=int, help="number of mesh cells")
    p.add_argument("--tau", type=float, help="time step (default h/2)")
    p.add_argument("--cfl", type=float)
    p.add_argument("--horizon", type=float, help="final time")
    p.add_argument("--gmax", type=float, help="absolute gradient limit for breaking detection")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--s0", type=float, help="initial E_x for classify")
    p.add_argument("--q0", type=float, help="initial V_x for classify")
    p.add_argument("--q-min", dest="q_min", type=float)
    p.add_argument("--q-max", dest="q_max", type=float)
    p.add_argument("--count", type=int, help="number of separatrix samples")
    p.add_argument("-v", "--verbose", action="store_true", default=None, help="log run summaries to stderr")
    return p


def make_config(argv: Sequence[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = read_config(args.config) if args.config else {}
    for name in _TYPES:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def workers() -> int:
    raw = os.environ.get("PLASMA_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def ordered_map(fn: Callable, items: Iterable) -> list:
    """Apply ``fn`` over ``items`` on a thread pool, keeping input order."""
    items = list(items)
    n = min(workers(), len(items)) or 1
    if n == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return "nan"
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return "%.17g" % float(v)


def write_table(header: Sequence[str], rows: Iterable[Sequence], out: str | None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


# -- scenarios ---------------------------------------------------------------


def run_classify(cfg: RunConfig):
    c = criterion.classify(cfg.nu, GradState(q=cfg.q0, s=cfg.s0))
    return ["nu", "s0", "q0", "region", "t_break"], [[cfg.nu, cfg.s0, cfg.q0, c.region.value, c.breaking_time]]


def run_separatrix(cfg: RunConfig):
    pts = criterion.sample_separatrix(cfg.nu, (cfg.q_min, cfg.q_max), cfg.count, skip_missing=True)
    return ["nu", "s0", "q0"], [[cfg.nu, s, q] for s, q in pts]


def run_simulate_euler(cfg: RunConfig):
    res = euler.run(cfg.data, cfg.nu, cfg.horizon, n_cells=cfg.cells, tau=cfg.tau, cfl=cfg.cfl, detection=cfg.detection)
    log.info("status=%s t_break=%s", res.status.value, res.t_break)
    rows = zip(
        res.times,
        res.max_abs_grad_history,
        res.density_min_history,
        res.density_max_history,
        res.center_density_history,
    )
    return ["t", "max_abs_grad", "n_min", "n_max", "n_center"], rows, res


def _fan_times(horizon: float, count: int = 1001) -> np.ndarray:
    return np.linspace(0.0, horizon, count)


def run_simulate_lagrange(cfg: RunConfig):
    data = cfg.data
    grid = Domain.for_profile(data, cfg.cells)
    fan = lagrange.launch_fan(data, cfg.nu, grid.nodes, _fan_times(cfg.horizon))
    crossing = lagrange.detect_crossing(fan)
    t_end = cfg.horizon
    if crossing is not None:
        # last sampled time strictly before the trajectories meet
        t_end = float(fan[0].t[fan[0].t < crossing][-1])
    log.info("crossing=%s reconstructed at t=%s", crossing, t_end)
    f = lagrange.reconstruct(fan, t_end, grid)
    N = euler.density(f)
    header = ["t", "x", "V", "E", "N", "crossing"]
    return header, [[t_end, x, v, e, n, crossing] for x, v, e, n in zip(f.x, f.V, f.E, N)]


def run_compare(cfg: RunConfig):
    data = cfg.data
    res = euler.run(data, cfg.nu, cfg.horizon, n_cells=cfg.cells, tau=cfg.tau, cfl=cfg.cfl, detection=cfg.detection)
    if res.broke:
        raise ColdPlasmaError(f"Eulerian run broke at t={res.t_break:.6g} before the horizon")
    f = res.final
    V, E, N = lagrange.exact_fields(data, cfg.nu, f.t, f.x)
    N_num = euler.density(f)
    log.info("sup|dV|=%.3e sup|dE|=%.3e", np.max(np.abs(f.V - V)), np.max(np.abs(f.E - E)))
    header = ["x", "V_euler", "V_exact", "E_euler", "E_exact", "N_euler", "N_exact"]
    return header, zip(f.x, f.V, V, f.E, E, N_num, N)


def figure2_series(nu: float, cells: int = FIG2_CELLS, horizon: float = FIG2_HORIZON, k: float = FIG2_K, tau=None, cfl=euler.DEFAULT_CFL, detection=euler.Detection()):
    res = euler.run(GaussianData(k1=k), nu, horizon, n_cells=cells, tau=tau, cfl=cfl, detection=detection)
    if res.broke:
        raise ColdPlasmaError(f"figure2 run at nu={nu} broke at t={res.t_break:.6g}")
    return res


def run_figure2(cfg: RunConfig):
    runs = ordered_map(lambda nu: figure2_series(nu, cfg.cells, tau=cfg.tau, cfl=cfg.cfl, detection=cfg.detection), FIG2_NUS)
    rows = []
    for nu, res in zip(FIG2_NUS, runs):
        rows.extend([nu, t, n] for t, n in zip(res.times, res.center_density_history))
    return ["nu", "t", "N_center"], rows


def figure3_curve(nu: float, ks: np.ndarray | None = None) -> list[tuple[float, float]]:
    """(k, T_br) at x = 0 for zero initial velocity, dropping k below threshold."""
    if ks is None:
        ks = np.linspace(FIG3_K[0], FIG3_K[1], FIG3_COUNT)

    def one(k):
        c = criterion.classify(nu, GradState(q=0.0, s=float(k)))
        return (float(k), c.breaking_time) if c.blowup else None

    return [r for r in ordered_map(one, ks) if r is not None]


def run_figure3(cfg: RunConfig):
    rows = []
    for nu in FIG3_NUS:
        rows.extend([nu, k, t] for k, t in figure3_curve(nu))
    return ["nu", "k", "T_br"], rows


def _fan_snapshot(data: GaussianData, nu: float, times: Sequence[float]):
    grid = Domain.for_profile(data, FIG_FAN - 1)
    fan = lagrange.launch_fan(data, nu, grid.nodes, np.asarray(times, float))
    rows = []
    for j, t in enumerate(times):
        rows.extend([t, c.x[j], c.E[j]] for c in fan)
    return rows


def run_figure4(cfg: RunConfig):
    nu = 0.2
    crit = criterion.k_cr_underdamped(nu)
    data = GaussianData(k1=crit.k_cr, rho_star=cfg.rho_star)
    return ["t", "x", "E"], _fan_snapshot(data, nu, [0.0, crit.t_break_at_threshold])


def run_figure5(cfg: RunConfig):
    nu = 2.5
    crit = criterion.k_cr_overdamped(nu)
    data = GaussianData(k2=crit.k_cr, rho_star=cfg.rho_star)
    T = crit.t_break_at_threshold
    return ["t", "x", "E"], _fan_snapshot(data, nu, [T / 4, T / 2, T])


def run_scenario(cfg: RunConfig) -> str:
    dispatch = {
        "classify": run_classify,
        "separatrix": run_separatrix,
        "simulate-euler": run_simulate_euler,
        "simulate-lagrange": run_simulate_lagrange,
        "compare": run_compare,
        "figure2": run_figure2,
        "figure3": run_figure3,
        "figure4": run_figure4,
        "figure5": run_figure5,
    }
    header, rows, *_ = dispatch[cfg.mode](cfg)
    return write_table(header, rows, cfg.out)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = make_config(argv)
    except ConfigError as exc:
        print(f"coldplasma: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse usage errors
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if cfg.verbose else logging.WARNING, format="%(message)s")
    try:
        run_scenario(cfg)
    except NoRoot as exc:
        print(f"coldplasma: {exc}", file=sys.stderr)
        return 2
    except (ColdPlasmaError, FloatingPointError, ArithmeticError) as exc:
        print(f"coldplasma: numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"coldplasma: invalid configuration: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
