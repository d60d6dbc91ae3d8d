"""Experiment drivers: DtN-map tests, evolution-error runs and temporal
convergence studies on the rectangle."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..exact_solutions import (
    PRESETS,
    eval_profile,
    get_preset,
    profile_normal_derivative,
)
from ..spectral_core import lgl_grid
from ..tbc_2d import DomainMap, NumericalBreakdown, Solver2D, grid_points
from ..tbc_2d.maptest import MAP_SCHEMES, MapTester

EXPERIMENTS = ("map-test", "evolve", "converge")
INSTABILITY_LIMIT = 1e3
PLATEAU_RATIO = 1.3

# (tmax, nt, N) at desk scale and at the full published scale
_DEFAULTS = {
    "map-test": {False: (2.0, 501, 95), True: (2.0, 1001, 199)},
    "evolve": {False: (2.0, 501, 95), True: (5.0, 5001, 199)},
    "converge": {
        False: (1.0, [65, 129, 257, 513, 1025], 95),
        True: (5.0, [2**k for k in range(8, 19)], 199),
    },
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    experiment: str = "evolve"
    scheme: str = "np-tr"
    M: int = 50
    preset: str = "cg-ia"
    c0: float | None = None
    A0: float | None = None
    domain: tuple = (-10.0, 10.0, -10.0, 10.0)
    N: int | None = None
    tmax: float | None = None
    nt: int | list | None = None
    snapshots: tuple = ()
    fmag: float | None = None
    full: bool = False
    out: str | None = None
    workers: int | None = None

    def resolved(self) -> "ExperimentConfig":
        """Fill unset sizes from the experiment defaults and validate."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        tmax, nt, N = _DEFAULTS[self.experiment][bool(self.full)]
        cfg = replace(
            self,
            scheme=str(self.scheme).lower(),
            preset=str(self.preset).lower(),
            tmax=float(self.tmax if self.tmax is not None else tmax),
            nt=self.nt if self.nt is not None else nt,
            N=int(self.N if self.N is not None else N),
            domain=tuple(float(v) for v in self.domain),
            snapshots=tuple(float(v) for v in self.snapshots),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.scheme not in MAP_SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose from {', '.join(MAP_SCHEMES)}")
        if self.scheme.startswith("cp") and self.experiment != "map-test":
            raise ConfigError("CP schemes are only available for the map-test experiment")
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {', '.join(PRESETS)}")
        if not self.scheme.startswith("cq") and (self.M is None or int(self.M) < 1):
            raise ConfigError("Padé-based schemes need M >= 1")
        if len(self.domain) != 4:
            raise ConfigError("domain needs four numbers xl,xr,xb,xt")
        xl, xr, xb, xt = self.domain
        if not (xl < xr and xb < xt):
            raise ConfigError(f"invalid rectangle {self.domain}")
        if self.N is None or self.N < 4:
            raise ConfigError("N (polynomial degree) must be >= 4")
        if not (self.tmax and self.tmax > 0):
            raise ConfigError("tmax must be positive")
        if self.experiment == "converge":
            nts = self.nt_list
            if len(nts) < 4:
                raise ConfigError("convergence studies need at least 4 values of nt")
            dts = [self.tmax / (n - 1) for n in nts]
            if max(dts) / min(dts) < 8.0 - 1e-12:
                raise ConfigError("the nt values must span at least a factor 8 in the time step")
        else:
            if isinstance(self.nt, (list, tuple)):
                raise ConfigError(f"{self.experiment} takes a single nt")
            if int(self.nt) < 2:
                raise ConfigError("nt must be >= 2")
        if self.fmag is not None and self.fmag <= 0:
            raise ConfigError("fmag must be positive")

    @property
    def nt_list(self) -> list:
        nts = self.nt if isinstance(self.nt, (list, tuple)) else [self.nt]
        out = sorted({int(n) for n in nts})
        if out[0] < 2:
            raise ConfigError("nt must be >= 2")
        return out

    @property
    def dt(self) -> float:
        return self.tmax / (int(self.nt) - 1)

    @property
    def method(self) -> str:
        return self.scheme.split("-")[1]

    def profile(self):
        return get_preset(self.preset, c0=self.c0, A0=self.A0)

    def make_domain(self, nt: int | None = None) -> DomainMap:
        n = int(self.nt if nt is None else nt)
        return DomainMap.from_bounds(self.domain, self.tmax / (n - 1), self.method)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["domain"] = list(self.domain)
        d["snapshots"] = list(self.snapshots)
        return d


@dataclass
class ErrorSeries:
    times: np.ndarray
    values: np.ndarray
    metric: str

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if self.metric not in ("boundary-dtn", "relative-l2", "max", "energy"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if np.any(self.values < 0):
            raise ValueError("error values must be non-negative")

    @property
    def max(self) -> float:
        return float(self.values.max()) if self.values.size else 0.0


@dataclass
class EvolutionResult:
    errors: ErrorSeries
    energy: ErrorSeries
    exact_energy: ErrorSeries
    norm_ratio_max: float
    snapshots: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)
    support_ratio: float = 0.0


@dataclass
class MapTestResult:
    errors: ErrorSeries
    storage: int = 0


@dataclass
class ConvergenceResult:
    nts: list
    dts: list
    max_errors: list
    slope: float | None
    pre_plateau: int
    plateau_dt: float | None
    series: dict = field(default_factory=dict)


# --------------------------------------------------------------------------


def run_map_test(config: ExperimentConfig) -> MapTestResult:
    cfg = config.resolved()
    if cfg.experiment != "map-test":
        cfg = replace(cfg, experiment="map-test").resolved()
    prof = cfg.profile()
    dom = cfg.make_domain()
    nt = int(cfg.nt)
    tester = MapTester(
        cfg.scheme,
        dom,
        cfg.N,
        cfg.N,
        lambda x1, x2, t: eval_profile(prof, x1, x2, t),
        lambda seg, x1, x2, t: profile_normal_derivative(prof, dom, seg, x1, x2, t),
        M=cfg.M,
        capacity=nt + 1,
    )
    times = dom.dt * np.arange(1, nt)
    vals = np.empty(nt - 1)
    for j in range(nt - 1):
        e = tester.step()
        if not math.isfinite(e):
            raise NumericalBreakdown(f"non-finite boundary error at step {j + 1}")
        vals[j] = e
    return MapTestResult(ErrorSeries(times, vals, "boundary-dtn"), tester.bc.storage())


def _quadrature(N: int, domain: DomainMap) -> np.ndarray:
    g = lgl_grid(N)
    return np.outer(g.weights, g.weights) * domain.J1 * domain.J2


def run_evolution(config: ExperimentConfig, nt: int | None = None) -> EvolutionResult:
    cfg = config.resolved()
    if cfg.scheme.startswith("cp"):
        raise ConfigError("CP schemes are only available for the map-test experiment")
    n_t = int(nt if nt is not None else (cfg.nt if not isinstance(cfg.nt, (list, tuple)) else cfg.nt_list[0]))
    prof = cfg.profile()
    dom = DomainMap.from_bounds(cfg.domain, cfg.tmax / (n_t - 1), cfg.method)
    N = cfg.N
    X1, X2 = grid_points(dom, N, N)
    w = _quadrature(N, dom)
    solver = Solver2D(cfg.scheme, dom, N, N, u0=lambda x, y: eval_profile(prof, x, y, 0.0), M=cfg.M, capacity=n_t + 1)
    fmag = cfg.fmag if cfg.fmag is not None else prof.f_mag

    mass0 = float(np.sum(w * np.abs(eval_profile(prof, X1, X2, 0.0)) ** 2))
    num_mass0 = solver.U0_norm**2
    snap_steps = {int(round(t / dom.dt)): t for t in cfg.snapshots if 0 <= t <= cfg.tmax + 1e-12}
    snapshots = {}
    if 0 in snap_steps:
        snapshots[snap_steps[0]] = solver.samples()

    times = dom.dt * np.arange(1, n_t)
    err = np.empty(n_t - 1)
    energy = np.empty(n_t - 1)
    exact_energy = np.empty(n_t - 1)
    ratio_max = 1.0 if num_mass0 > 0 else 0.0
    for j in range(n_t - 1):
        solver.step()
        vals = solver.samples()
        exact = eval_profile(prof, X1, X2, solver.t)
        ex_mass = float(np.sum(w * np.abs(exact) ** 2))
        num_mass = float(np.sum(w * np.abs(vals) ** 2))
        diff = float(np.sum(w * np.abs(vals - exact) ** 2))
        if diff == 0.0:
            e = 0.0
        elif ex_mass == 0.0:
            e = math.inf
        else:
            e = math.sqrt(diff / ex_mass)
        if not math.isfinite(e) or e > INSTABILITY_LIMIT:
            raise NumericalBreakdown(
                f"relative error {e:.3e} exceeds {INSTABILITY_LIMIT:g} at step {j + 1} "
                f"(t={solver.t:.6g}); the march is unstable for this configuration"
            )
        err[j] = e
        energy[j] = num_mass / num_mass0 if num_mass0 > 0 else 0.0
        exact_energy[j] = ex_mass / mass0 if mass0 > 0 else 0.0
        if num_mass0 > 0:
            ratio_max = max(ratio_max, math.sqrt(num_mass / num_mass0))
        if (j + 1) in snap_steps:
            snapshots[snap_steps[j + 1]] = vals
    c = solver.bc.counters
    counters = {
        "segment_history": c.segment_history,
        "corner_history": c.corner_history,
        "storage": c.storage,
    }
    grids = {t: magnitude_grid(v, fmag) for t, v in snapshots.items()}
    return EvolutionResult(
        ErrorSeries(times, err, "relative-l2"),
        ErrorSeries(times, energy, "energy"),
        ErrorSeries(times, exact_energy, "energy"),
        ratio_max,
        grids,
        counters,
        solver.support_ratio,
    )


def magnitude_grid(values, fmag: float) -> np.ndarray:
    """f_mag * log10|u| (minus infinity where u vanishes)."""
    with np.errstate(divide="ignore"):
        return fmag * np.log10(np.abs(np.asarray(values)))


def _max_error(args) -> tuple[int, float, np.ndarray]:
    cfg, nt = args
    res = run_evolution(cfg, nt=nt)
    return nt, res.errors.max, res.errors.values


def fit_slope(dts, errors, ratio: float = PLATEAU_RATIO):
    """Least-squares slope of log(error) against log(dt) over the points
    before the plateau.

    Points are ordered by decreasing dt.  The plateau starts at the first
    refinement whose error reduction falls below ``ratio`` per halving of
    dt.  Returns (slope or None, number of pre-plateau points, dt at the
    plateau onset or None)."""
    order = np.argsort(dts)[::-1]
    d = np.asarray(dts, float)[order]
    e = np.asarray(errors, float)[order]
    n = len(d)
    last = n - 1
    for i in range(n - 1):
        halvings = math.log2(d[i] / d[i + 1])
        if e[i + 1] <= 0 or e[i] / e[i + 1] < ratio**halvings:
            last = i
            break
    count = last + 1
    plateau_dt = float(d[last]) if last < n - 1 else None
    if count < 3:
        return None, count, plateau_dt
    x = np.log(d[:count])
    y = np.log(e[:count])
    slope = float(np.polyfit(x, y, 1)[0])
    return slope, count, plateau_dt


def run_convergence(config: ExperimentConfig) -> ConvergenceResult:
    cfg = config.resolved()
    if cfg.experiment != "converge":
        cfg = replace(cfg, experiment="converge").resolved()
    nts = cfg.nt_list
    workers = cfg.workers or min(len(nts), os.cpu_count() or 1)
    jobs = [(cfg, n) for n in nts]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_max_error, jobs))
    else:
        results = [_max_error(job) for job in jobs]
    by_nt = {nt: (m, s) for nt, m, s in results}
    dts = [cfg.tmax / (n - 1) for n in nts]
    errs = [by_nt[n][0] for n in nts]
    slope, count, plateau_dt = fit_slope(dts, errs)
    return ConvergenceResult(nts, dts, errs, slope, count, plateau_dt, {n: by_nt[n][1] for n in nts})


def cq_memory_estimate(N: int, nt: int) -> dict:
    """Bytes of auxiliary storage for a CQ run: the segment fronts and
    corner arrays kept here, and the full two-time wedges for comparison."""
    c = 16
    kept = c * (4 * nt * (N + 1) + 4 * nt * nt)
    wedge = c * 4 * (N + 1) * nt * (nt + 1) // 2
    return {"kept_bytes": kept, "full_wedge_bytes": wedge}


__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ConvergenceResult",
    "ErrorSeries",
    "EvolutionResult",
    "ExperimentConfig",
    "MapTestResult",
    "cq_memory_estimate",
    "fit_slope",
    "magnitude_grid",
    "run_convergence",
    "run_evolution",
    "run_map_test",
]
