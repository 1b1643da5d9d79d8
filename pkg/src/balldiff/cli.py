"""Command-line front end: run simulations from config files, write tables.

Subcommands map one-to-one onto runner functions so everything the CLI
can do is callable from Python with the same arguments. Runners return a
process exit status; they write their output files even when an
in-config tolerance check fails, so a failed run can still be inspected.
"""
from __future__ import annotations

import argparse
import itertools
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analytic import analytic_sigma, gaussian_pdf
from .config import (
    SCHEMA,
    RunConfig,
    build_config,
    double_slit_grid,
    load_config,
    load_raw,
    single_beam_grid,
)
from .core import grid_spanning
from .errors import BalldiffError, ConfigError, ValidationError
from .interference import detect_fringe_maxima, fringe_spacing, simulate_double_slit
from .stepper import evolve, sample_gaussian_field, second_moment_sigma
from .tables import read_table, write_table
from .trajectories import trace_flux_lines

#: Acceptable observed convergence order for the second-order stencil.
ORDER_WINDOW = (1.7, 2.3)


def _say(quiet: bool, message: str) -> None:
    if not quiet:
        print(message)


def _complain(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _trapezoid_mass(values: np.ndarray, dx: float) -> float:
    return float((values.sum() - 0.5 * (values[0] + values[-1])) * dx)


def run_spread(cfg: RunConfig, out_dir: Path, *, quiet: bool = False) -> int:
    """Evolve a single packet; record densities and the spreading history."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = single_beam_grid(cfg)
    initial = sample_gaussian_field(cfg.state, grid)
    snaps, report = evolve(initial, grid, cfg.state, cfg.params, cfg.snapshot_times)

    times = np.array([s.time for s in snaps])
    sigma_sim = np.array([second_moment_sigma(s, grid) for s in snaps])
    sigma_ref = np.array(
        [analytic_sigma(t, cfg.state.sigma0, cfg.params.diffusivity) for t in times]
    )
    rel_error = np.abs(sigma_sim - sigma_ref) / sigma_ref

    write_table(
        out_dir / "sigma_timeseries.txt",
        ["t", "sigma_simulated", "sigma_analytic", "rel_error"],
        [times, sigma_sim, sigma_ref, rel_error],
    )
    for i, snap in enumerate(snaps):
        write_table(
            out_dir / f"field_{i:03d}.txt",
            ["t", "x", "p"],
            [np.full(grid.nx, snap.time), grid.x, snap.values],
        )
    write_table(
        out_dir / "stepper_report.txt",
        ["macro_steps", "total_substeps", "max_courant", "mass_drift", "boundary_leak"],
        [[report.macro_steps], [report.total_substeps], [report.max_courant],
         [report.mass_drift], [report.boundary_leak]],
    )

    _say(quiet, f"spread: {len(snaps)} snapshots on {grid.nx} nodes, "
                f"{report.total_substeps} substeps, max nu {report.max_courant:.4f}")
    _say(quiet, f"spread: max sigma rel error {rel_error.max():.3e}, "
                f"mass drift {report.mass_drift:.3e}")
    if cfg.sigma_rel_tol is not None and rel_error.max() > cfg.sigma_rel_tol:
        _complain(
            f"sigma rel error {rel_error.max():.3e} exceeds tolerance {cfg.sigma_rel_tol:g}"
        )
        return 1
    return 0


def run_doubleslit(cfg: RunConfig, out_dir: Path, *, quiet: bool = False) -> int:
    """Evolve both slit beams, compose intensities, locate fringe maxima."""
    if cfg.slits is None:
        raise ConfigError(f"{cfg.origin}: [slits] section is required for doubleslit")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = double_slit_grid(cfg)
    imap = simulate_double_slit(cfg.slits, grid, cfg.params, cfg.snapshot_times)

    total_name = "p_total_normalized" if cfg.normalize_total else "p_total"
    for i, t in enumerate(imap.times):
        total = imap.p_total[i]
        if cfg.normalize_total:
            total = total / _trapezoid_mass(total, grid.dx)
        write_table(
            out_dir / f"intensity_{i:03d}.txt",
            ["t", "x", "p1", "p2", total_name],
            [np.full(grid.nx, t), grid.x, imap.p1[i], imap.p2[i], total],
        )

    dvx = cfg.slits.dvx
    if dvx != 0.0:
        spacing = fringe_spacing(cfg.params, dvx)
        x_det = detect_fringe_maxima(
            imap.x_axis, imap.p1[-1], imap.p2[-1], imap.p_total[-1]
        )
        orders = np.rint(x_det / spacing)
        x_ref = orders * spacing
        err_cells = np.abs(x_det - x_ref) / grid.dx
        _say(quiet, f"doubleslit: {x_det.size} maxima, spacing {spacing:.6g}, "
                    f"worst offset {err_cells.max() if err_cells.size else 0.0:.3f} cells")
    else:
        orders = x_det = x_ref = err_cells = np.empty(0)
        _say(quiet, "doubleslit: dvx = 0, no fringes (beams add incoherently in phase)")
    write_table(
        out_dir / "fringes.txt",
        ["n", "x_detected", "x_analytic", "error_cells"],
        [orders, x_det, x_ref, err_cells],
    )

    if cfg.fringe_cell_tol is not None and dvx != 0.0:
        if x_det.size == 0:
            _complain("no interference maxima detected")
            return 1
        if err_cells.max() > cfg.fringe_cell_tol:
            _complain(
                f"fringe offset {err_cells.max():.3f} cells exceeds "
                f"tolerance {cfg.fringe_cell_tol:g}"
            )
            return 1
    return 0


def run_trajectories(cfg: RunConfig, out_dir: Path, *, quiet: bool = False) -> int:
    """Trace flux lines of a single packet and check their homothety."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = single_beam_grid(cfg)
    initial = sample_gaussian_field(cfg.state, grid)
    snaps, _ = evolve(initial, grid, cfg.state, cfg.params, cfg.snapshot_times)
    traj = trace_flux_lines(snaps, grid, cfg.quantiles)

    nq, nt = traj.paths.shape
    q_col = np.repeat(traj.quantiles, nt)
    t_col = np.tile(traj.times, nq)
    # display ordinate: distance flown transverse to the spreading axis
    write_table(
        out_dir / "trajectories.txt",
        ["quantile", "t", "y_display", "x"],
        [q_col, t_col, cfg.v_y * t_col, traj.paths.ravel()],
    )

    center = cfg.state.center
    sigma_ref = analytic_sigma(traj.times[0], cfg.state.sigma0, cfg.params.diffusivity)
    rows_q, rows_t, rows_exp, rows_act, rows_dev = [], [], [], [], []
    for i, q in enumerate(traj.quantiles):
        offset0 = traj.paths[i, 0] - center
        if abs(offset0) < 1e-9 * cfg.state.sigma0:
            continue  # median: homothety ratio is 0/0
        for k, t in enumerate(traj.times):
            scale = analytic_sigma(t, cfg.state.sigma0, cfg.params.diffusivity) / sigma_ref
            expected = center + offset0 * scale
            actual = traj.paths[i, k]
            rows_q.append(q)
            rows_t.append(t)
            rows_exp.append(expected)
            rows_act.append(actual)
            rows_dev.append(abs(actual - expected) / abs(offset0 * scale))
    write_table(
        out_dir / "homothety.txt",
        ["quantile", "t", "x_expected", "x_actual", "rel_dev"],
        [rows_q, rows_t, rows_exp, rows_act, rows_dev],
    )

    worst = max(rows_dev) if rows_dev else 0.0
    _say(quiet, f"trajectories: {nq} flux lines over {nt} snapshots, "
                f"worst homothety deviation {worst:.3e}")
    if cfg.homothety_tol is not None and worst > cfg.homothety_tol:
        _complain(f"homothety deviation {worst:.3e} exceeds tolerance {cfg.homothety_tol:g}")
        return 1
    return 0


def run_convergence(
    cfg: RunConfig, out_dir: Path, *, refinements: int = 3, quiet: bool = False
) -> int:
    """Grid-refinement study against the closed-form spreading Gaussian.

    Each refinement halves dx and quarters dt, so a second-order scheme
    should show the max-norm error at t_final dropping fourfold per
    level. Exits nonzero when the final observed order leaves
    :data:`ORDER_WINDOW`.
    """
    refinements = int(refinements)
    if refinements < 2:
        raise ValidationError(f"need at least 2 refinements, got {refinements}")
    if cfg.t_final <= 0.0:
        raise ValidationError("convergence study needs t_final > 0")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    sigma_end = analytic_sigma(cfg.t_final, cfg.state.sigma0, cfg.params.diffusivity)
    half = cfg.safety_span * sigma_end

    levels = list(range(refinements + 1))
    dxs, dts, errors = [], [], []
    for level in levels:
        dx = cfg.dx / 2**level
        dt = cfg.dt / 4**level
        grid = grid_spanning(
            cfg.state.center, half, dx, dt=dt, t_final=cfg.t_final, nx_cap=cfg.nx_cap
        )
        initial = sample_gaussian_field(cfg.state, grid)
        snaps, _ = evolve(initial, grid, cfg.state, cfg.params, [cfg.t_final])
        exact = gaussian_pdf(grid.x, cfg.state.center, sigma_end)
        err = float(np.max(np.abs(snaps[-1].values - exact)))
        dxs.append(dx)
        dts.append(dt)
        errors.append(err)
        _say(quiet, f"convergence: level {level} dx={dx:g} dt={dt:g} err={err:.3e}")

    orders = [math.log2(errors[i - 1] / errors[i]) for i in levels[1:]]
    write_table(
        out_dir / "convergence.txt",
        ["level", "dx", "dt", "linf_error"],
        [levels, dxs, dts, errors],
    )
    write_table(out_dir / "orders.txt", ["level", "order"], [levels[1:], orders])

    _say(quiet, "convergence: observed orders " + ", ".join(f"{o:.3f}" for o in orders))
    lo, hi = ORDER_WINDOW
    bad = [o for o in orders if not (lo <= o <= hi)]
    if bad:
        _complain(f"observed order {bad[0]:.3f} outside [{lo}, {hi}]")
        return 1
    return 0


_SWEEP_COMMANDS = {
    "spread": (run_spread, "max_sigma_rel_error"),
    "doubleslit": (run_doubleslit, "fringe_spacing"),
    "trajectories": (run_trajectories, "max_homothety_dev"),
}


def _parse_sweep(raw: dict[str, dict[str, str]], origin: str):
    sweep = raw.get("sweep")
    if sweep is None:
        raise ConfigError(f"{origin}: [sweep] section is required for sweep")
    command = sweep.get("command")
    if command not in _SWEEP_COMMANDS:
        raise ConfigError(
            f"{origin}: [sweep] command must be one of {sorted(_SWEEP_COMMANDS)}, "
            f"got {command!r}"
        )
    axes: list[tuple[str, str, str, tuple[float, ...]]] = []
    for dotted, text in sweep.items():
        if dotted == "command":
            continue
        section, _, key = dotted.partition(".")
        kind = SCHEMA.get(section, {}).get(key)
        if not key or kind is None:
            raise ConfigError(f"{origin}: [sweep] unknown target {dotted!r}")
        if kind not in ("float", "int"):
            raise ConfigError(f"{origin}: [sweep] cannot sweep {kind} key {dotted!r}")
        values = tuple(float(s) for s in text.split(",") if s.strip())
        if not values:
            raise ConfigError(f"{origin}: [sweep] {dotted} has no values")
        axes.append((dotted, section, key, values))
    if not axes:
        raise ConfigError(f"{origin}: [sweep] no parameters to sweep")
    return command, axes


def _format_override(kind: str, dotted: str, value: float, origin: str) -> str:
    if kind == "int":
        if not float(value).is_integer():
            raise ConfigError(f"{origin}: [sweep] {dotted} needs integers, got {value!r}")
        return str(int(value))
    return repr(float(value))


def _run_sweep_point(args) -> tuple[int, int, float]:
    """One sweep point in a worker process; never raises."""
    index, raw_point, origin, command, point_dir = args
    runner, _ = _SWEEP_COMMANDS[command]
    try:
        cfg = build_config(raw_point, f"{origin} (point {index})")
        status = runner(cfg, Path(point_dir), quiet=True)
        metric = _point_metric(command, cfg, Path(point_dir))
    except BalldiffError:
        return index, 1, float("nan")
    return index, status, metric


def _point_metric(command: str, cfg: RunConfig, point_dir: Path) -> float:
    if command == "spread":
        names, data = read_table(point_dir / "sigma_timeseries.txt")
        return float(data[:, names.index("rel_error")].max())
    if command == "doubleslit":
        dvx = cfg.slits.dvx
        return math.inf if dvx == 0.0 else fringe_spacing(cfg.params, dvx)
    names, data = read_table(point_dir / "homothety.txt")
    if data.shape[0] == 0:
        return 0.0
    return float(data[:, names.index("rel_dev")].max())


def run_sweep(
    raw: dict[str, dict[str, str]],
    origin: str,
    out_dir: Path,
    *,
    workers: int = 1,
    quiet: bool = False,
) -> int:
    """Run a command once per point of a parameter grid.

    Points are laid out in file order of the swept keys with the last
    key varying fastest, exactly ``itertools.product``. Each point gets
    its own ``point_NNN`` directory; a failing point marks the sweep
    failed but never stops the remaining points.
    """
    workers = int(workers)
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")
    command, axes = _parse_sweep(raw, origin)
    metric_name = _SWEEP_COMMANDS[command][1]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    base = {section: dict(kv) for section, kv in raw.items() if section != "sweep"}
    jobs = []
    combos = list(itertools.product(*(values for _, _, _, values in axes)))
    for index, combo in enumerate(combos):
        raw_point = {section: dict(kv) for section, kv in base.items()}
        for (dotted, section, key, _), value in zip(axes, combo):
            kind = SCHEMA[section][key]
            raw_point.setdefault(section, {})[key] = _format_override(
                kind, dotted, value, origin
            )
        jobs.append((index, raw_point, origin, command, str(out_dir / f"point_{index:03d}")))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_sweep_point, jobs))
    else:
        results = [_run_sweep_point(job) for job in jobs]
    results.sort(key=lambda r: r[0])

    statuses = [status for _, status, _ in results]
    metrics = [metric for _, _, metric in results]
    for (index, status, metric), combo in zip(results, combos):
        settings = " ".join(
            f"{dotted}={value:g}" for (dotted, _, _, _), value in zip(axes, combo)
        )
        _say(quiet, f"sweep: point {index:03d} {settings} status={status} "
                    f"{metric_name}={metric:g}")

    columns: list[np.ndarray] = [np.arange(len(combos), dtype=np.float64)]
    names = ["point"]
    for axis_pos, (dotted, _, _, _) in enumerate(axes):
        names.append(dotted)
        columns.append(np.array([combo[axis_pos] for combo in combos], dtype=np.float64))
    names += ["status", metric_name]
    columns += [np.array(statuses, dtype=np.float64), np.array(metrics, dtype=np.float64)]
    write_table(out_dir / "manifest.txt", names, columns)

    failed = sum(1 for s in statuses if s != 0)
    _say(quiet, f"sweep: {len(combos)} points, {failed} failed")
    if failed:
        _complain(f"{failed} of {len(combos)} sweep points failed")
        return 1
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="balldiff",
        description="Ballistic diffusion: packet spreading, interference, flux lines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("spread", "evolve one packet and compare against the spreading law"),
        ("doubleslit", "evolve two slit beams and compose the interference pattern"),
        ("trajectories", "trace constant-probability flux lines of one packet"),
        ("convergence", "grid-refinement study against the closed-form solution"),
        ("sweep", "repeat a command over a grid of parameter values"),
    ]
    for name, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument(
            "--out", help="output directory (default: [output] directory from the config)"
        )
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        if name == "convergence":
            p.add_argument(
                "--refinements", type=int, default=3,
                help="number of dx halvings after the base level (default 3)",
            )
        if name == "sweep":
            p.add_argument(
                "--workers", type=int, default=1,
                help="worker processes for sweep points (default 1)",
            )
    return parser


def _resolve_out(arg_out: str | None, configured: str | None, origin: str) -> Path:
    if arg_out is not None:
        return Path(arg_out)
    if configured:
        return Path(configured)
    raise ConfigError(f"{origin}: no output directory; pass --out or set [output] directory")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            raw = load_raw(args.config)
            out = _resolve_out(args.out, raw.get("output", {}).get("directory"),
                               str(args.config))
            return run_sweep(raw, str(args.config), out,
                             workers=args.workers, quiet=args.quiet)
        cfg = load_config(args.config)
        out = _resolve_out(args.out, cfg.directory, cfg.origin)
        if args.command == "spread":
            return run_spread(cfg, out, quiet=args.quiet)
        if args.command == "doubleslit":
            return run_doubleslit(cfg, out, quiet=args.quiet)
        if args.command == "trajectories":
            return run_trajectories(cfg, out, quiet=args.quiet)
        return run_convergence(cfg, out, refinements=args.refinements, quiet=args.quiet)
    except BalldiffError as exc:
        _complain(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
