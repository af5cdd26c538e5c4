"""
wnls - command-line front-end

Subcommands:
  simulate     evolve initial data, record observables, run monitors
  classify     energy report and criticality class of initial data or a snapshot
  mt-sweep     weighted Moser-Trudinger threshold sweep
  rearrange    rearrangement suite on initial data or a snapshot
  probe        strichartz | log-estimate | strauss | hardy

Exit status: 0 success, 1 configuration error, 2 any other toolkit error.
Errors print a single line "<category>: <message>" to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from tabulate import tabulate

from ..calculations import profiles
from ..calculations.diagnostics import (
    concentration_monitor,
    localized_mass_monitor,
    record_observables,
    scattering_diagnostic,
    strichartz_probe,
)
from ..calculations.errors import ConfigError, WnlsError
from ..calculations.evolve import integrate
from ..calculations.functionals import (
    Criticality,
    calibrate_hardy_constant,
    calibrate_log_estimate_constant,
    calibrate_strauss_constant,
    critical_alpha,
    hamiltonian,
    hardy_check,
    hardy_integral,
    log_estimate_probe,
    moser_sequence,
    moser_trudinger_sweep,
    strauss_probe,
)
from ..calculations.grid import Field, lp_norm, make_grid, make_singular_weight
from ..calculations.nonlinearity import PhysParams
from ..calculations.rearrangement import (
    decreasing_rearrangement,
    hardy_littlewood_check,
    polya_szego_check,
    schwarz_symmetrization,
    weight_rearrangement,
)
from ..config import settings
from ..data.exports import write_energy_csv, write_observables_csv, write_rows_csv, write_sweep_csv
from ..data.run_config import RunConfig, build_initial_field, load_config
from ..data.snapshot import SnapshotMeta, load_snapshot, save_snapshot
from ..visualization.field_plots import build_intensity_heatmap, build_observables_figure, write_figures_html

logger = logging.getLogger(__name__)


def setup_logging(quiet: bool = False) -> None:
    level = logging.WARNING if quiet else getattr(logging, settings.LOG_LEVEL, logging.INFO)
    logging.basicConfig(level=level, format=settings.LOG_FORMAT, force=True)


def _show(rows, headers, quiet: bool) -> None:
    if not quiet:
        print(tabulate(rows, headers=headers, floatfmt=".10g"))


def _run_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = replace(cfg, init=replace(cfg.init, seed=args.seed))
    return cfg


def _out_dir(args, required: bool = False) -> Optional[Path]:
    if args.out is not None:
        return Path(args.out)
    return Path(settings.DEFAULT_OUT_DIR) if required else None


def _field_and_b(args) -> tuple[Field, float]:
    """Initial data from --snapshot (b from its header unless --b) or from the config."""
    if getattr(args, "snapshot", None):
        u, meta = load_snapshot(args.snapshot)
        return u, args.b if args.b is not None else meta.b
    cfg = _run_config(args)
    return build_initial_field(cfg), args.b if getattr(args, "b", None) is not None else cfg.phys.b


# ============================================================
# Subcommands
# ============================================================

def cmd_simulate(args) -> int:
    cfg = _run_config(args)
    out = _out_dir(args, required=True)
    grid = cfg.make_grid()
    p = PhysParams(cfg.phys.b)
    w = make_singular_weight(grid, p.b)
    u0 = build_initial_field(cfg)
    report = hamiltonian(u0, w, p)
    _show(report.summary_rows(), ["quantity", "value"], args.quiet)

    snapshot_dir = out / "snapshots"

    def persist(state):
        save_snapshot(snapshot_dir / f"snap_{state.step_index:07d}.snls", state.u, SnapshotMeta(b=p.b, t=state.t))

    snapshots = integrate(u0, cfg.evolve_config(), w, p, observer=persist)
    diag = cfg.diagnostics
    series = record_observables(snapshots, u0, w, p, S=diag.S, Sp=diag.S_prime)

    write_energy_csv(report, out / "energy.csv")
    write_observables_csv(series, out / "observables.csv")

    monitor_rows: List[tuple] = []
    if "localized_mass" in diag.monitors:
        lm = localized_mass_monitor(series, u0, diag.S, diag.S_prime, report.hamiltonian + report.mass)
        monitor_rows += [("localized_mass", k, v) for k, v in lm.summary_rows()]
    if "concentration" in diag.monitors:
        if report.criticality is Criticality.SUPERCRITICAL:
            logger.warning("Concentration monitor assumes H(u0) <= 1; data are supercritical")
        cm = concentration_monitor(series)
        monitor_rows += [("concentration", k, v) for k, v in cm.summary_rows()]
    if "scattering" in diag.monitors:
        sc = scattering_diagnostic(snapshots)
        write_rows_csv(sc.summary_rows(), ["time", "cauchy_difference"], out / "scattering.csv")
        monitor_rows.append(("scattering", "decreasing", sc.decreasing_after(0.0)))
    if monitor_rows:
        write_rows_csv(monitor_rows, ["monitor", "quantity", "value"], out / "monitors.csv")
        _show(monitor_rows, ["monitor", "quantity", "value"], args.quiet)

    if args.html:
        write_figures_html(
            [build_intensity_heatmap(snapshots[-1].u, title=f"|u|² at t={snapshots[-1].t:g}"), build_observables_figure(series)],
            out / "report.html",
            title="Simulation report",
        )
    logger.info(f"✅ Simulation outputs written to {out}")
    return 0


def cmd_classify(args) -> int:
    u, b = _field_and_b(args)
    p = PhysParams(b)
    report = hamiltonian(u, make_singular_weight(u.grid, p.b), p)
    print(f"{report.criticality.value} H={report.hamiltonian:.12g}")
    _show(report.summary_rows(), ["quantity", "value"], args.quiet)
    out = _out_dir(args)
    if out is not None:
        write_energy_csv(report, out / "energy.csv")
    if args.html and out is not None:
        write_figures_html([build_intensity_heatmap(u)], out / "classify.html")
    return 0


def cmd_mt_sweep(args) -> int:
    out = _out_dir(args, required=True)
    grid = make_grid(args.grid_n, args.half_width) if args.grid_n else None
    results = []
    rows = []
    for b in args.b:
        star = critical_alpha(b)
        alphas = [factor * star for factor in args.factors]
        result = moser_trudinger_sweep(b, alphas, grid=grid, normalization=args.normalization)
        results.append(result)
        for alpha, first, last, verdict in result.summary_rows():
            rows.append((b, alpha / star, alpha, first, last, verdict))
        bracket = result.transition()
        if bracket is None:
            logger.warning(f"No Bounded/Diverging transition found for b={b}")
        else:
            logger.info(f"b={b}: transition in [{bracket[0] / star:.3g}, {bracket[1] / star:.3g}]·α*")
    write_sweep_csv(results, out / "mt_sweep.csv")
    _show(rows, ["b", "alpha/alpha*", "alpha", "first ratio", "last ratio", "verdict"], args.quiet)
    return 0


def cmd_rearrange(args) -> int:
    u, b = _field_and_b(args)
    v = Field(u.grid, u.modulus())
    star = schwarz_symmetrization(v)
    profile = decreasing_rearrangement(v)
    ps = polya_szego_check(v)
    hl = hardy_littlewood_check(v, v.shifted(u.grid.n // 4, 0))
    rows = [("levels", len(profile.values)), ("total measure", profile.total_measure)]
    for q in (1, 2, 4):
        rows.append((f"L{q} before/after", f"{lp_norm(v, q):.12g} / {lp_norm(star, q):.12g}"))
    rows += [
        ("grad^2 before", ps.grad_before),
        ("grad^2 after", ps.grad_after),
        ("Polya-Szego", "holds" if ps.holds else "violated"),
        ("Hardy-Littlewood (u, shifted u)", "holds" if hl.holds else "violated"),
    ]
    if 0.0 < b < 2.0:
        wr = weight_rearrangement(b)
        rows.append((f"weight rearrangement b={b} max rel. error", wr.max_relative_error))
    _show(rows, ["quantity", "value"], args.quiet)
    out = _out_dir(args)
    if out is not None:
        write_rows_csv(list(zip(profile.values, profile.measures)), ["value", "measure"], out / "rearrangement.csv")
        if args.html:
            write_figures_html([build_intensity_heatmap(v, "|u|"), build_intensity_heatmap(star, "Schwarz symmetrization")], out / "rearrange.html")
    return 0


def _probe_family(cfg: RunConfig, seed: int) -> List[tuple[str, Field]]:
    grid = cfg.make_grid()
    family = [(f"gaussian A={A:g}", profiles.gaussian(grid, A)) for A in (0.1, 0.5, 1.0, 2.0, 3.0)]
    family.append(("moser N=16", moser_sequence(16, grid)))
    family += [(f"random seed={seed + i}", profiles.random_band_limited(grid, seed=seed + i)) for i in range(3)]
    return family


def cmd_probe(args) -> int:
    cfg = _run_config(args)
    seed = args.seed if args.seed is not None else settings.DEFAULT_SEED
    out = _out_dir(args)
    rows: List[tuple] = []
    headers = ["case", "value"]

    if args.probe == "strichartz":
        samples = args.samples or cfg.diagnostics.ensemble_size
        T = args.T or cfg.diagnostics.probe_T
        report = strichartz_probe(samples, cfg.make_grid(), T, seed=seed)
        rows = report.summary_rows()
        headers = ["quantity", "value"]
    elif args.probe == "log-estimate":
        family = _probe_family(cfg, seed)
        for name, u in family:
            result = log_estimate_probe(u, args.lam, args.mu, args.beta)
            rows.append((name, result.needed_C if result else float("nan")))
        rows.append(("calibrated C", calibrate_log_estimate_constant([u for _, u in family], args.lam, args.mu, args.beta)))
    elif args.probe == "strauss":
        grid = cfg.make_grid()
        family = [(f"gaussian width={s:g}", profiles.gaussian(grid, 1.0, s)) for s in (0.5, 1.0, 2.0)]
        family += [(f"moser N={N}", moser_sequence(N, grid)) for N in (4, 16, 64)]
        for name, u in family:
            rows.append((name, strauss_probe(u, args.p)))
        rows.append(("calibrated C_p", calibrate_strauss_constant([u for _, u in family], args.p)))
    elif args.probe == "hardy":
        b = args.b if args.b is not None else cfg.phys.b
        base = cfg.grid.n
        headers = ["n", "gaussian", "plateau"]
        fields = []
        for n in (base // 2, base, base * 2):
            grid = make_grid(n, cfg.grid.half_width)
            g, pl = profiles.gaussian(grid), profiles.plateau(grid)
            fields += [g, pl]
            if b < 2.0:
                rows.append((n, hardy_check(g, b, args.gamma), hardy_check(pl, b, args.gamma)))
            else:
                rows.append((n, hardy_integral(g, b, args.gamma), hardy_integral(pl, b, args.gamma)))
        if b < 2.0:
            rows.append(("calibrated C", calibrate_hardy_constant(fields, b, args.gamma), ""))

    _show(rows, headers, args.quiet)
    if out is not None:
        write_rows_csv(rows, headers, out / f"probe_{args.probe.replace('-', '_')}.csv")
    return 0


# ============================================================
# Parser
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Run configuration (TOML)")
    common.add_argument("--out", type=Path, help=f"Output directory (default for simulate/mt-sweep: {settings.DEFAULT_OUT_DIR})")
    common.add_argument("--seed", type=int, help="Seed for randomized data and probes")
    common.add_argument("--quiet", action="store_true", help="Only warnings and errors; no tables")
    common.add_argument("--html", action="store_true", help="Also write plotly HTML figures")

    parser = argparse.ArgumentParser(
        prog="wnls",
        description="Weighted exponential NLS simulator and numerical-analysis toolkit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
EXAMPLES:
  # Evolve the configured initial data, write CSVs and snapshots to out/
  wnls simulate --config run.toml --out out

  # Criticality class of a stored snapshot
  wnls classify --snapshot out/snapshots/snap_0000000.snls

  # Moser-Trudinger threshold sweep
  wnls mt-sweep --b 0.25 0.5 0.75

  # Strichartz probe with 32 seeded samples
  wnls probe strichartz --samples 32 --seed 7
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", parents=[common], help="Evolve initial data and run monitors")
    simulate.set_defaults(handler=cmd_simulate)

    classify = sub.add_parser("classify", parents=[common], help="Energy report and criticality class")
    classify.add_argument("--snapshot", type=Path, help="Classify a snapshot file instead of the configured data")
    classify.add_argument("--b", type=float, help="Weight exponent (overrides config or snapshot header)")
    classify.set_defaults(handler=cmd_classify)

    sweep = sub.add_parser("mt-sweep", parents=[common], help="Moser-Trudinger threshold sweep")
    sweep.add_argument("--b", type=float, nargs="+", default=[settings.DEFAULT_B], help="Weight exponents")
    sweep.add_argument("--factors", type=float, nargs="+", default=settings.MT_ALPHA_FACTORS, help="alpha as multiples of 2π(2-b)")
    sweep.add_argument("--normalization", choices=["gradient", "h1"], default="gradient")
    sweep.add_argument("--grid-n", type=int, help="Evaluate on an n×n grid instead of radial quadrature")
    sweep.add_argument("--half-width", type=float, default=2.0, help="Grid half-width for --grid-n")
    sweep.set_defaults(handler=cmd_mt_sweep)

    rearrange = sub.add_parser("rearrange", parents=[common], help="Rearrangement suite")
    rearrange.add_argument("--snapshot", type=Path, help="Use a snapshot file instead of the configured data")
    rearrange.add_argument("--b", type=float, help="Weight exponent for the weight-rearrangement check")
    rearrange.set_defaults(handler=cmd_rearrange)

    probe = sub.add_parser("probe", help="Functional-inequality probes")
    probes = probe.add_subparsers(dest="probe", required=True)
    strichartz = probes.add_parser("strichartz", parents=[common])
    strichartz.add_argument("--samples", type=int, help="Ensemble size")
    strichartz.add_argument("--T", type=float, help="Time horizon")
    log_estimate = probes.add_parser("log-estimate", parents=[common])
    log_estimate.add_argument("--lam", type=float, default=2.0 / np.pi)
    log_estimate.add_argument("--mu", type=float, default=1.0)
    log_estimate.add_argument("--beta", type=float, default=0.5)
    strauss = probes.add_parser("strauss", parents=[common])
    strauss.add_argument("--p", type=float, default=2.0)
    hardy = probes.add_parser("hardy", parents=[common])
    hardy.add_argument("--b", type=float, help="Weight exponent (b >= 2 shows the divergence)")
    hardy.add_argument("--gamma", type=float, default=4.0)
    for probe_parser in (strichartz, log_estimate, strauss, hardy):
        probe_parser.set_defaults(handler=cmd_probe)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(getattr(args, "quiet", False))
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"{exc.category}: {exc}", file=sys.stderr)
        return 1
    except WnlsError as exc:
        print(f"{exc.category}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
