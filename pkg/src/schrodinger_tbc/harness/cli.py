"""Command-line driver.

Exit codes: 0 success, 2 configuration error, 3 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from ..banded import PivotBreakdownError
from ..rational_weights import Method, cq_weights, np_params, pade, shifted_cq_weights
from ..tbc_2d import NumericalBreakdown
from . import export
from .experiments import (
    ConfigError,
    ExperimentConfig,
    cq_memory_estimate,
    run_convergence,
    run_evolution,
    run_map_test,
)

EXIT_OK, EXIT_CONFIG, EXIT_BREAKDOWN = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with any of the options below")
    p.add_argument("--scheme", help="cq-bdf1, cq-tr, np-bdf1, np-tr (cp-bdf1, cp-tr for map-test)")
    p.add_argument("--M", type=int, help="Padé order for NP/CP schemes")
    p.add_argument("--preset", help="profile: cg-ia, cg-ib, cg-iia, cg-iib, hg-ia, ...")
    p.add_argument("--c0", type=float, help="profile speed")
    p.add_argument("--a0", type=float, dest="A0", help="profile amplitude")
    p.add_argument("--N", type=int, help="polynomial degree per axis (N+1 LGL points)")
    p.add_argument("--nt", type=_ints, help="number of time levels (comma list for converge)")
    p.add_argument("--tmax", type=float, help="final time")
    p.add_argument("--domain", type=_floats, help="xl,xr,xb,xt")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--full", action="store_true", default=None, help="published problem sizes")
    p.add_argument("--snapshots", type=_floats, help="times t1,t2,... of magnitude grids")
    p.add_argument("--fmag", type=float, help="contour scale f_mag")
    p.add_argument("--workers", type=int, help="parallel runs for converge")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schrodinger-tbc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (
        ("map-test", "accuracy of the discrete DtN maps fed with exact Dirichlet data"),
        ("evolve", "full march with relative L2 error against the exact profile"),
        ("converge", "maximum error over a list of nt and the fitted order"),
    ):
        _experiment_args(sub.add_parser(name, help=help_))
    w = sub.add_parser("weights", help="convolution-quadrature weights as CSV")
    w.add_argument("--method", default="bdf1")
    w.add_argument("--n", type=int, default=10)
    w.add_argument("--eta", type=float, help="shift eta of the symbol sqrt(delta/dt + eta^2)")
    w.add_argument("--dt", type=float, default=1.0)
    w.add_argument("--out", type=Path)
    pd = sub.add_parser("pade", help="diagonal Padé coefficients of sqrt(z) as CSV")
    pd.add_argument("--M", type=int, default=20)
    pd.add_argument("--rho", type=float, help="also list the scaled NP parameters for this rho")
    pd.add_argument("--out", type=Path)
    return parser


def load_config(args: argparse.Namespace, experiment: str) -> ExperimentConfig:
    """Defaults, then the JSON file, then explicit flags."""
    names = {f.name for f in fields(ExperimentConfig)}
    values = {}
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        data = {("A0" if k == "a0" else k): v for k, v in data.items()}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(data)
    for name in names:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if isinstance(values.get("nt"), list):
        if experiment != "converge":
            if len(values["nt"]) != 1:
                raise ConfigError(f"{experiment} takes a single nt")
            values["nt"] = values["nt"][0]
    if "domain" in values:
        values["domain"] = tuple(values["domain"])
    if "snapshots" in values:
        values["snapshots"] = tuple(values["snapshots"])
    values["experiment"] = experiment
    if values.get("out") is not None:
        values["out"] = str(values["out"])
    return ExperimentConfig(**values).resolved()


def _summary_line(label: str, items: dict) -> str:
    return label + ": " + ", ".join(f"{k}={v}" for k, v in items.items())


def _cmd_map_test(cfg: ExperimentConfig) -> None:
    res = run_map_test(cfg)
    s = res.errors
    print(_summary_line(cfg.scheme, {"preset": cfg.preset, "max_error": export.fmt(s.max), "steps": len(s.values)}))
    if cfg.out:
        out = Path(cfg.out)
        export.write_series_csv(out / "error.csv", s.times, s.values, "error")
        export.write_sidecar(out / "run.json", cfg.as_dict(), cfg.scheme, {"max_error": s.max, "metric": s.metric})


def _cmd_evolve(cfg: ExperimentConfig) -> None:
    if cfg.scheme.startswith("cq"):
        est = cq_memory_estimate(cfg.N, int(cfg.nt))
        print(
            f"CQ auxiliary storage estimate: {est['kept_bytes'] / 2**20:.1f} MiB "
            f"(full two-time wedges would need {est['full_wedge_bytes'] / 2**30:.2f} GiB)",
            file=sys.stderr,
        )
    res = run_evolution(cfg)
    s = res.errors
    print(
        _summary_line(
            cfg.scheme,
            {
                "preset": cfg.preset,
                "max_error": export.fmt(s.max),
                "max_norm_ratio": export.fmt(res.norm_ratio_max),
                "steps": len(s.values),
            },
        )
    )
    if cfg.out:
        out = Path(cfg.out)
        export.write_series_csv(out / "error.csv", s.times, s.values, "error")
        export.write_series_csv(out / "energy.csv", res.energy.times, res.energy.values, "energy")
        export.write_series_csv(out / "exact_energy.csv", res.exact_energy.times, res.exact_energy.values, "energy")
        for t, grid in sorted(res.snapshots.items()):
            export.write_grid_csv(out / f"contour_t{export.time_label(t)}.csv", grid)
        export.write_sidecar(
            out / "run.json",
            cfg.as_dict(),
            cfg.scheme,
            {"max_error": s.max, "max_norm_ratio": res.norm_ratio_max, "counters": res.counters},
        )


def _cmd_converge(cfg: ExperimentConfig) -> None:
    res = run_convergence(cfg)
    for nt, dt, e in zip(res.nts, res.dts, res.max_errors):
        print(f"nt={nt} dt={export.fmt(dt)} max_error={export.fmt(e)}")
    slope = "unavailable" if res.slope is None else f"{res.slope:.4f}"
    print(_summary_line(cfg.scheme, {"slope": slope, "pre_plateau_points": res.pre_plateau}))
    if cfg.out:
        out = Path(cfg.out)
        export.write_table_csv(
            out / "convergence.csv", ["nt", "dt", "max_error"], [(n, float(d), float(e)) for n, d, e in zip(res.nts, res.dts, res.max_errors)]
        )
        for nt, vals in res.series.items():
            dt = cfg.tmax / (nt - 1)
            export.write_series_csv(out / f"error_nt{nt}.csv", dt * np.arange(1, nt), vals, "error")
        export.write_sidecar(
            out / "run.json",
            cfg.as_dict(),
            cfg.scheme,
            {"slope": res.slope, "pre_plateau_points": res.pre_plateau, "plateau_dt": res.plateau_dt},
        )


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        export._write(out, text)


def _cmd_weights(args) -> None:
    if args.n < 0:
        raise ConfigError("n must be >= 0")
    method = Method.parse(args.method)
    if args.eta is None:
        w = cq_weights(method, args.n).omega
    else:
        if args.dt <= 0:
            raise ConfigError("dt must be positive")
        w = shifted_cq_weights(method, args.eta, args.dt, args.n)
    lines = ["j,omega"] + [f"{j},{export.fmt(v)}" for j, v in enumerate(w)]
    _emit("\n".join(lines) + "\n", args.out)


def _cmd_pade(args) -> None:
    if args.M < 1:
        raise ConfigError("M must be >= 1")
    p = pade(args.M)
    if args.rho is None:
        lines = ["k,eta,b", f"0,,{export.fmt(p.b0)}"]
        lines += [f"{k + 1},{export.fmt(e)},{export.fmt(b)}" for k, (e, b) in enumerate(zip(p.etak, p.bk))]
    else:
        if args.rho <= 0:
            raise ConfigError("rho must be positive")
        q = np_params(args.M, args.rho)
        lines = [f"# varpi={export.fmt(q.varpi)} b_bar0={export.fmt(q.b_bar0)}", "k,eta_bar,b_bar,Gamma"]
        lines += [
            f"{k + 1},{export.fmt(e)},{export.fmt(b)},{export.fmt(g)}"
            for k, (e, b, g) in enumerate(zip(q.eta_bar, q.b_bar, q.Gamma))
        ]
    _emit("\n".join(lines) + "\n", args.out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "weights":
            _cmd_weights(args)
        elif args.command == "pade":
            _cmd_pade(args)
        else:
            cfg = load_config(args, args.command)
            {"map-test": _cmd_map_test, "evolve": _cmd_evolve, "converge": _cmd_converge}[args.command](cfg)
    except (NumericalBreakdown, PivotBreakdownError, FloatingPointError) as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except export.ExportError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 1
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
