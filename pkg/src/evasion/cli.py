"""Command-line entry point.

Subcommands ``steady-state``, ``stability``, ``simulate`` and ``sweep``.
Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 blow-up.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from evasion.config import ConfigError, ExperimentConfig, load_config, preset_config, with_overrides
from evasion.equilibrium import NoCoexistenceError, linearize
from evasion.io import DiagnosticsWriter, SnapshotWriter, fmt
from evasion.kinetics import DomainError, ModelVariant
from evasion.pde_solver import RunStatus, simulate
from evasion.stability import (
    ModeSet,
    ModeTruncationError,
    chi_H,
    classify_A,
    dispersion_table,
    threshold_report,
    write_dispersion_csv,
)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_BLOWUP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which means numerical failure here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", help="built-in parameter set (para1)")
    src.add_argument("--config", type=Path, help="configuration file")
    p.add_argument("--model", choices=[m.value for m in ModelVariant])
    p.add_argument("--chi", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--dim", type=int, choices=(1, 2))
    p.add_argument("--eta", type=float, help="predator competition (model B2)")
    p.add_argument("--family", help="functional response family")
    p.add_argument("--n", type=int, help="cells per side")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="evasion", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("steady-state", help="coexistence state and Jacobian")
    _common(s)

    s = sub.add_parser("stability", help="thresholds and per-mode dispersion table")
    _common(s)
    s.add_argument("--j-max", type=int)
    s.add_argument("--csv", type=Path, help="write the per-mode table here (default: stdout)")
    s.add_argument("--modes", type=int, default=20, help="rows of the per-mode table")

    s = sub.add_parser("simulate", help="integrate the PDE system")
    _common(s)
    s.add_argument("--init", help="cosine:j=1 | gaussian-NP | gaussian-P | constant")
    s.add_argument("--t-end", type=float)
    s.add_argument("--dt-max", type=float)
    s.add_argument("--out", type=Path, help="output directory")
    s.add_argument("--snapshot-every", type=float)
    s.add_argument("--record-every", type=float)

    s = sub.add_parser("sweep", help="stability verdicts over a parameter grid")
    _common(s)
    s.add_argument("--chi-range", help="start:stop:count")
    s.add_argument("--xi-range", help="start:stop:count")
    s.add_argument("--L-range", help="start:stop:count (chi^H per domain length)")
    s.add_argument("--j-max", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--csv", type=Path)
    return ap


def _resolve(args) -> ExperimentConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = preset_config(args.preset or "para1")
    over = {
        "model": args.model,
        "params.chi": args.chi,
        "params.xi": args.xi,
        "params.L": args.L,
        "params.dim": args.dim,
        "kinetics.eta": args.eta,
        "kinetics.family": args.family,
        "grid.n": args.n,
    }
    if args.model == "B2" and args.eta is None and cfg.params.kinetics.eta == 0:
        raise ConfigError("model B2 needs --eta > 0")
    for key, attr in (("init", "init"), ("solver.t_end", "t_end"), ("solver.dt_max", "dt_max"),
                      ("solver.snapshot_every", "snapshot_every"), ("solver.record_every", "record_every")):
        over[key] = getattr(args, attr, None)
    if over.get("solver.dt_max") is not None:
        over["solver.dt_init"] = min(cfg.solver.dt_init, over["solver.dt_max"])
    if getattr(args, "out", None) is not None:
        over["output.dir"] = str(args.out)
    return with_overrides(cfg, over)


def _modes(cfg: ExperimentConfig, j_max=None) -> ModeSet:
    return ModeSet.for_domain(cfg.dim, cfg.params.L, j_max)


# ---------------------------------------------------------------------------
# subcommands


def cmd_steady_state(cfg: ExperimentConfig, args, out) -> int:
    J = linearize(cfg.params)
    E = J.state
    print(f"model = {cfg.params.variant.value}", file=out)
    print(f"N = {fmt(E.N)}", file=out)
    print(f"P = {fmt(E.P)}", file=out)
    print(f"W = {fmt(E.W)}", file=out)
    print(f"residual = {fmt(E.residual)}", file=out)
    print(f"conditions_verified = {E.conditions_verified}", file=out)
    for name in ("a11", "a12", "a13", "a21", "a22", "a23", "a31", "a32", "a33"):
        print(f"{name} = {fmt(getattr(J, name))}", file=out)
    print(f"sign_ok = {J.sign_ok}", file=out)
    return EXIT_OK


def cmd_stability(cfg: ExperimentConfig, args, out) -> int:
    ms = _modes(cfg, args.j_max)
    rep = threshold_report(cfg.params, ms)
    for key, val in rep.rows():
        print(f"{key} = {val}", file=out)
    if cfg.is_pure_preset and cfg.preset == "para1" and cfg.dim == 1 and cfg.params.kinetics.eta == 0:
        from evasion.reference import tabulated_chi_H

        tab = tabulated_chi_H(cfg.params.L)
        print(f"chi_H_tabulated = {fmt(tab.chi_H)}", file=out)
        print(f"j0_tabulated = {tab.index[0]}", file=out)
    for note in rep.notes:
        print(f"# {note}", file=out)
    records = dispersion_table(cfg.params, ms, max_modes=args.modes)
    prey = cfg.params.variant is ModelVariant.A
    if args.csv is not None:
        with open(args.csv, "w") as fh:
            write_dispersion_csv(records, fh, prey)
    else:
        print("", file=out)
        write_dispersion_csv(records, out, prey)
    return EXIT_OK


def cmd_simulate(cfg: ExperimentConfig, args, out) -> int:
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    snaps = SnapshotWriter(outdir)
    with open(outdir / "diagnostics.csv", "w") as fh:
        writer = DiagnosticsWriter(fh)
        tr = simulate(cfg.params, cfg.grid, cfg.initial, cfg.solver, on_snapshot=snaps, on_record=writer, keep_snapshots=False)
    dist = tr.state.distance(tr.E)
    print(f"status = {tr.status.value}", file=out)
    print(f"t = {fmt(tr.state.t)}", file=out)
    print(f"steps = {tr.steps}", file=out)
    print(f"distance_to_E = {fmt(dist)}", file=out)
    print(f"snapshots = {snaps.count}", file=out)
    if tr.message:
        print(f"# {tr.message}", file=out)
    if tr.status is RunStatus.BLOWN_UP:
        return EXIT_BLOWUP
    if tr.status is RunStatus.FAILED:
        return EXIT_NUMERICAL
    return EXIT_OK


def _range(text: str | None, name: str) -> np.ndarray | None:
    if text is None:
        return None
    try:
        a, b, k = text.split(":")
        vals = np.linspace(float(a), float(b), int(k))
    except ValueError:
        raise ConfigError(f"--{name} expects start:stop:count") from None
    if vals.size == 0:
        raise ConfigError(f"--{name} is empty")
    return vals


def _sweep_chi_xi(job):
    params, dim, j_max, chi, xi = job
    ms = ModeSet.for_domain(dim, params.L, j_max)
    c = classify_A(params, chi, xi, ms)
    label = "" if c.violating_mode is None else ",".join(map(str, c.violating_mode))
    return [fmt(chi), fmt(xi), c.case, int(c.stable), label, fmt(c.chi_H), fmt(c.chi_S)]


def _sweep_L(job):
    params, dim, j_max, L = job
    p = replace(params, L=L)
    ch = chi_H(p, ModeSet.for_domain(dim, L, j_max))
    return [fmt(L), fmt(ch.chi_H), ",".join(map(str, ch.index)), fmt(ch.h)]


def cmd_sweep(cfg: ExperimentConfig, args, out) -> int:
    chis = _range(args.chi_range, "chi-range")
    xis = _range(args.xi_range, "xi-range")
    Ls = _range(args.L_range, "L-range")
    params = cfg.params
    if Ls is not None:
        if chis is not None or xis is not None:
            raise ConfigError("--L-range cannot be combined with --chi-range/--xi-range")
        header = ["L", "chi_H", "j0", "h_j0"]
        jobs = [(replace(params, xi=0.0, variant=ModelVariant.B), cfg.dim, args.j_max, float(L)) for L in Ls]
        fn = _sweep_L
    else:
        if chis is None:
            chis = np.array([params.chi])
        if xis is None:
            xis = np.array([params.xi])
        header = ["chi", "xi", "case", "stable", "violating_mode", "chi_H", "chi_S"]
        base = replace(params, variant=ModelVariant.A, xi=0.0)
        jobs = [(base, cfg.dim, args.j_max, float(c), float(x)) for c in chis for x in xis]
        fn = _sweep_chi_xi
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * args.workers))))
    else:
        rows = [fn(j) for j in jobs]
    sink = open(args.csv, "w") if args.csv is not None else out
    try:
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if sink is not out:
            sink.close()
    return EXIT_OK


COMMANDS = {
    "steady-state": cmd_steady_state,
    "stability": cmd_stability,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def run_command(argv=None, out=None) -> int:
    """Parse ``argv`` and run the subcommand; returns the exit code."""
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_VALIDATION
    try:
        cfg = _resolve(args)
        return COMMANDS[args.command](cfg, args, out)
    except (ConfigError, DomainError, NoCoexistenceError, ModeTruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
