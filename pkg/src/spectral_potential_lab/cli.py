"""Command-line front end: config handling, CSV and plot emission.

Subcommands: eig, modes, hessian-check, optimize, deficit.  Every run is a
pure function of its resolved configuration, which is written next to the
outputs.  Plot output is both a gnuplot script referencing the CSVs and a
rendered PNG of the same view.

Exit codes: 0 success (including flagged non-convergence), 2 configuration
error, 3 infeasible parameters, 4 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import plots
from .deficit import FamilyPlan, deficit_survey
from .eigensolve import PotentialField, principal_eigenpair, second_eigenvalue
from .errors import (
    ConfigError,
    DegenerateInputError,
    DomainError,
    GridSizeError,
    InfeasibleError,
    IterationLimitError,
    SolverError,
)
from .grids import Grid, IntervalGrid, PolarGrid, RadialGrid
from .optimize import (
    annulus_competitor,
    minimize_delta_2d,
    minimize_delta_radial,
    optimal_potential,
)
from .rearrange import l1_distance
from .shapecalc import FourierPerturbation, ball_context, fd_shape_check, solve_mode, hessian_quadratic_form

SCHEMA_LINE = "# spectral-potential-lab schema v1"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SCHEMA_LINE + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _load_config_file(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        cfg[key.strip()] = value.strip()
    return cfg


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults <- config file <- explicit flags, in increasing priority."""
    cfg = dict(defaults)
    if args.config:
        file_cfg = _load_config_file(args.config)
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for key, raw in file_cfg.items():
            cfg[key] = _coerce(key, raw, defaults[key])
    for key in defaults:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def _coerce(key: str, raw: str, default):
    try:
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: cannot parse {raw!r}") from exc
    return raw


def _write_resolved(cfg: dict, outdir: Path) -> None:
    lines = [f"{k}={cfg[k]}" for k in sorted(cfg)]
    (outdir / "run_config.txt").write_text("\n".join(lines) + "\n")


def _build_grid(cfg: dict) -> Grid:
    geom = cfg["geometry"]
    if geom == "interval":
        return IntervalGrid(cfg["a"], cfg["b"], cfg["n"])
    if geom == "disk":
        return RadialGrid(cfg["R"], cfg["n"])
    if geom == "polar":
        return PolarGrid(cfg["R"], cfg["nr"], cfg["ntheta"])
    raise ConfigError(f"unknown geometry {geom!r} (expected interval, disk, or polar)")


def _coordinates(grid: Grid) -> tuple[list[str], np.ndarray]:
    if isinstance(grid, IntervalGrid):
        return ["x"], grid.nodes[:, None]
    if isinstance(grid, RadialGrid):
        return ["r"], grid.nodes[:, None]
    rr = np.repeat(grid.r, grid.ntheta)
    tt = np.tile(grid.theta, grid.nr)
    return ["r", "theta"], np.column_stack([rr, tt])


def _parse_floats(raw: str, key: str) -> list[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse float list {raw!r}") from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_eig(args: argparse.Namespace) -> int:
    defaults = {
        "geometry": "interval", "a": -1.0, "b": 1.0, "R": 1.0,
        "n": 1023, "nr": 128, "ntheta": 128, "v0": 0.6,
        "potential": "ball", "delta": 0.05, "potential-file": "",
        "outdir": "out-eig",
    }
    cfg = _resolve(args, defaults)
    grid = _build_grid(cfg)
    outdir = Path(cfg["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_resolved(cfg, outdir)

    kind = cfg["potential"]
    if kind == "ball":
        V = optimal_potential(grid, cfg["v0"])
    elif kind == "annulus":
        V = annulus_competitor(grid, cfg["v0"], cfg["delta"]).field
    elif kind == "file":
        path = cfg["potential-file"]
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read potential file {path!r}: {exc}") from exc
        values = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line.split(",")[-1]))
            except ValueError:
                continue  # header row
        if len(values) != grid.size:
            raise ConfigError(
                f"potential file {path!r} has {len(values)} samples, grid needs {grid.size}")
        V = PotentialField(grid, np.array(values))
    else:
        raise ConfigError(f"unknown potential {kind!r} (expected ball, annulus, or file)")

    eig = principal_eigenpair(grid, V)
    lam2 = second_eigenvalue(grid, V)
    names, coords = _coordinates(grid)
    rows = [list(coords[i]) + [eig.u[i], V.values[i]] for i in range(grid.size)]
    _write_csv(outdir / "eig.csv", names + ["u", "V"], rows)
    _write_csv(outdir / "summary.csv", ["lambda", "lambda2", "residual", "mass"],
               [[eig.lam, lam2, eig.residual, V.mass]])
    (outdir / "eig.gp").write_text(
        "set datafile separator ','\n"
        f"plot 'eig.csv' using 1:{len(names) + 1} with lines title 'u', \\\n"
        f"     'eig.csv' using 1:{len(names) + 2} with lines title 'V'\n"
    )
    if not isinstance(grid, PolarGrid):
        plots.plot_profile(outdir / "eig.png", grid.nodes,
                           {"u": eig.u, "V": V.values}, names[0], f"lambda = {eig.lam:.6f}")
    return 0


def cmd_modes(args: argparse.Namespace) -> int:
    defaults = {"R": 1.0, "n": 2048, "v0": 0.25, "kmax": 32, "outdir": "out-modes"}
    cfg = _resolve(args, defaults)
    if cfg["kmax"] < 1:
        raise ConfigError("kmax must be >= 1")
    grid = RadialGrid(cfg["R"], cfg["n"])
    outdir = Path(cfg["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_resolved(cfg, outdir)

    ctx = ball_context(grid, cfg["v0"])
    rows = []
    for k in range(1, cfg["kmax"] + 1):
        mode = solve_mode(ctx, grid, k)
        rows.append([k, mode.omega_k, mode.psi_at_rstar])
    _write_csv(outdir / "omega.csv", ["k", "omega_k", "psi_at_rstar"], rows)
    limit = -ctx.du_star_boundary
    (outdir / "omega.gp").write_text(
        "set datafile separator ','\n"
        f"plot 'omega.csv' using 1:2 with linespoints title 'omega_k', \\\n"
        f"     {limit} with lines dashtype 2 title \"-u*'(r*)\"\n"
    )
    ks = np.array([r[0] for r in rows], dtype=float)
    oms = np.array([r[1] for r in rows])
    plots.plot_omega(outdir / "omega.png", ks, oms, limit)
    return 0


def _parse_gspec(spec: str) -> FourierPerturbation:
    spec = spec.strip()
    if spec.startswith("cos"):
        trig, k = "cos", spec[3:]
    elif spec.startswith("sin"):
        trig, k = "sin", spec[3:]
    else:
        raise ConfigError(f"mode spec {spec!r} must look like cos2 or sin3")
    try:
        k = int(k)
    except ValueError as exc:
        raise ConfigError(f"mode spec {spec!r}: bad index") from exc
    if k < 1:
        raise ConfigError(f"mode spec {spec!r}: index must be >= 1")
    alpha, beta = np.zeros(k), np.zeros(k)
    (alpha if trig == "cos" else beta)[k - 1] = 1.0
    return FourierPerturbation(alpha=alpha, beta=beta)


def cmd_hessian_check(args: argparse.Namespace) -> int:
    defaults = {
        "R": 1.0, "v0": 0.25, "n": 1024, "nr": 160, "ntheta": 160,
        "gspecs": "cos1,cos2,sin3", "ts": "0.08,0.04,0.02",
        "outdir": "out-hessian",
    }
    cfg = _resolve(args, defaults)
    specs = [s for s in cfg["gspecs"].split(",") if s.strip()]
    if not specs:
        raise ConfigError("gspecs: at least one boundary mode is required")
    ts = _parse_floats(cfg["ts"], "ts")
    radial = RadialGrid(cfg["R"], cfg["n"])
    polar = PolarGrid(cfg["R"], cfg["nr"], cfg["ntheta"])
    outdir = Path(cfg["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_resolved(cfg, outdir)

    ctx = ball_context(radial, cfg["v0"])
    rows, plot_rows = [], []
    for spec in specs:
        g = _parse_gspec(spec)
        k = g.kmax
        qf = hessian_quadratic_form(ctx, [solve_mode(ctx, radial, k)], g)
        check = fd_shape_check(ctx, polar, g, ts)
        for i, t in enumerate(ts):
            fd1 = check.first_derivative_estimates[i]
            fd2 = check.second_derivative_estimates[i]
            rel = abs(fd2 - qf) / abs(qf)
            rows.append([spec, t, check.L_values[t], fd1, fd2, qf, rel])
            plot_rows.append({"g": spec, "t": t, "fd2": fd2, "fourier_form": qf})
    _write_csv(outdir / "hessian.csv",
               ["g", "t", "L", "fd1", "fd2", "fourier_form", "rel_err"], rows)
    (outdir / "hessian.gp").write_text(
        "set datafile separator ','\n"
        "plot 'hessian.csv' using 2:5 with points title 'FD2', \\\n"
        "     'hessian.csv' using 2:6 with lines title 'fourier form'\n"
    )
    plots.plot_hessian(outdir / "hessian.png", plot_rows)
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    defaults = {
        "geometry": "interval", "a": -1.0, "b": 1.0, "R": 1.0,
        "n": 1023, "nr": 96, "ntheta": 96, "v0": 0.6,
        "deltas": "0.1,0.2,0.4", "remark3": False, "outdir": "out-optimize",
    }
    cfg = _resolve(args, defaults)
    if cfg["remark3"]:
        cfg.update(geometry="interval", a=-1.0, b=1.0, v0=0.6, deltas="0.1,0.2,0.4,0.8")
    grid = _build_grid(cfg)
    deltas = _parse_floats(cfg["deltas"], "deltas")
    outdir = Path(cfg["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_resolved(cfg, outdir)

    names, coords = _coordinates(grid)
    V_star = optimal_potential(grid, cfg["v0"])
    report_rows = []
    for delta in deltas:
        if delta == 0.0:
            V, rep = V_star, None
            lam = principal_eigenpair(grid, V_star).lam
            row = [0.0, lam, 0, True, "", "", "", "", 0.0]
        else:
            if isinstance(grid, PolarGrid):
                rep = minimize_delta_2d(grid, cfg["v0"], delta)
            else:
                rep = minimize_delta_radial(grid, cfg["v0"], delta)
            V = rep.V
            comp = annulus_competitor(grid, cfg["v0"], delta) \
                if not isinstance(grid, PolarGrid) else None
            l1_ann = l1_distance(V, comp.field) if comp is not None else ""
            row = [delta, rep.lam, rep.iterations, rep.converged,
                   rep.mu_delta, rep.eta_delta, rep.zeta_delta, rep.f_delta, l1_ann]
        report_rows.append(row)
        tag = f"{delta:g}".replace(".", "p")
        header = names + ["V_delta", "Vstar_minus_Vdelta"]
        diff = V_star.values - V.values
        body = [list(coords[i]) + [V.values[i], diff[i]] for i in range(grid.size)]
        _write_csv(outdir / f"potential_delta_{tag}.csv", header, body)
        if not isinstance(grid, PolarGrid):
            plots.plot_profile(outdir / f"potential_delta_{tag}.png", grid.nodes,
                               {"V_delta": V.values, "V*-V_delta": diff},
                               names[0], f"delta = {delta:g}")
    _write_csv(outdir / "report.csv",
               ["delta", "lambda", "iterations", "converged", "mu", "eta",
                "zeta", "f_delta", "l1_to_annulus"], report_rows)
    (outdir / "optimize.gp").write_text(
        "set datafile separator ','\n"
        + "plot " + ", \\\n     ".join(
            f"'potential_delta_{f'{d:g}'.replace('.', 'p')}.csv' "
            f"using 1:{len(names) + 1} with lines title 'delta={d:g}'"
            for d in deltas
        ) + "\n"
    )
    return 0


def _parse_plan(raw: str) -> list[FamilyPlan]:
    plan = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) < 2:
            raise ConfigError(f"plan entry {chunk!r} must be family:count[:key=val,...]")
        family, count = parts[0].strip(), parts[1].strip()
        try:
            count = int(count)
        except ValueError as exc:
            raise ConfigError(f"plan entry {chunk!r}: bad count") from exc
        params: dict = {}
        if len(parts) > 2:
            for kv in parts[2].split(","):
                if not kv.strip():
                    continue
                if "=" not in kv:
                    raise ConfigError(f"plan entry {chunk!r}: expected key=val, got {kv!r}")
                key, val = kv.split("=", 1)
                params[key.strip()] = float(val)
        plan.append(FamilyPlan(family, count, params))
    if not plan:
        raise ConfigError("survey plan is empty")
    return plan


def cmd_deficit(args: argparse.Namespace) -> int:
    defaults = {
        "geometry": "disk", "a": -1.0, "b": 1.0, "R": 1.0,
        "n": 512, "nr": 96, "ntheta": 96, "v0": 0.25,
        "plan": "annulus:3:delta=0.05;radial-random:5", "seed": 2026,
        "outdir": "out-deficit",
    }
    cfg = _resolve(args, defaults)
    grid = _build_grid(cfg)
    plan = _parse_plan(cfg["plan"])
    if any(p.family == "normal-deformation" for p in plan):
        if not isinstance(grid, PolarGrid):
            raise ConfigError("normal-deformation family requires geometry=polar")
        ctx = ball_context(RadialGrid(cfg["R"], 1024), cfg["v0"])
        plan = [FamilyPlan(p.family, p.count, {**p.params, "ctx": ctx})
                if p.family == "normal-deformation" else p for p in plan]
    outdir = Path(cfg["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_resolved(cfg, outdir)

    report = deficit_survey(grid, cfg["v0"], plan, cfg["seed"])
    sample_rows = [[s.index, s.family, s.delta, s.deficit, s.ratio, s.flagged]
                   for s in report.samples]
    _write_csv(outdir / "samples.csv",
               ["index", "family", "delta", "deficit", "ratio", "flagged"], sample_rows)
    fam_rows = [["min_ratio", report.min_ratio], ["seed", report.seed]]
    for fam, (mn, md) in sorted(report.per_family.items()):
        fam_rows.append([f"{fam}_min", mn])
        fam_rows.append([f"{fam}_median", md])
    _write_csv(outdir / "report.csv", ["stat", "value"], fam_rows)
    (outdir / "deficit.gp").write_text(
        "set datafile separator ','\n"
        "set logscale y\n"
        "plot 'samples.csv' using 3:5 with points title 'ratio vs delta'\n"
    )
    plots.plot_ratio_scatter(
        outdir / "deficit.png",
        np.array([s.delta for s in report.samples]),
        np.array([s.ratio for s in report.samples]),
        [s.family for s in report.samples],
    )
    return 0


# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--geometry", choices=["interval", "disk", "polar"])
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--nr", type=int)
    p.add_argument("--ntheta", type=int)
    p.add_argument("--v0", type=float)
    p.add_argument("--outdir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spl", description="eigenvalue optimization experiments for -Laplace - V")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eig", help="solve one eigenproblem, emit eig.csv/summary.csv")
    _add_common(p)
    p.add_argument("--potential", choices=["ball", "annulus", "file"])
    p.add_argument("--delta", type=float)
    p.add_argument("--potential-file", dest="potential_file")
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("modes", help="boundary mode problems and omega_k table")
    _add_common(p)
    p.add_argument("--kmax", type=int)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("hessian-check", help="FD cross-check of the Fourier quadratic form")
    _add_common(p)
    p.add_argument("--gspecs", help="comma list of boundary modes, e.g. cos1,cos2,sin3")
    p.add_argument("--ts", help="comma list of decreasing FD steps")
    p.set_defaults(func=cmd_hessian_check)

    p = sub.add_parser("optimize", help="distance-constrained minimization sweep")
    _add_common(p)
    p.add_argument("--deltas", help="comma list of L1 distances")
    p.add_argument("--remark3", action="store_const", const=True, default=None,
                   help="preset: interval, v0=0.6, deltas 0.1,0.2,0.4,0.8")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("deficit", help="sampled survey of the quantitative deficit")
    _add_common(p)
    p.add_argument("--plan", help="family:count[:key=val,...];... survey plan")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_deficit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GridSizeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleError, DomainError, DegenerateInputError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except (SolverError, IterationLimitError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
