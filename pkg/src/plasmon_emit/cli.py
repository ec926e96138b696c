"""Command line entry point ``plasmon-emit``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import first_local_minimum, phase_shift
from .config import RunConfig, echo_config, parse_config, with_values
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    NumericError,
    ParseError,
    RangeError,
    ResourceError,
)
from .io_utils import atomic_write_text
from .runner import band_grid, density_model, enhancement_map, simulate
from .spectral import DENSITY_CSV_HEADER
from .validation import format_table, run_checks

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3
SUBCOMMANDS = ("enhance", "simulate", "compare-fca", "validate")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plasmon-emit", description=__doc__)
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="output path (overrides the 'output' key)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override one configuration key")
    return p


def load_config(path, overrides) -> RunConfig:
    text = Path(path).read_text() if path else ""
    return parse_config(text, overrides)


def _out_path(cfg: RunConfig, default: str) -> Path:
    return Path(cfg.output or default)


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}_{suffix}{path.suffix or '.csv'}")


def cmd_enhance(cfg: RunConfig) -> int:
    table = enhancement_map(cfg)
    out = _out_path(cfg, "enhancement.csv")
    atomic_write_text(out, table.to_csv())
    if cfg.cache:
        table.save(cfg.cache)
    print(f"wrote {out} ({table.omega_grid.size} x {table.distance_grid.size} points)")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    traj = simulate(cfg)
    out = _out_path(cfg, "trajectory.csv")
    atomic_write_text(out, traj.to_csv())
    print(f"wrote {out} ({traj.times.size} samples, solver {traj.solver}); "
          f"final p1+p2 = {traj.total[-1]:.6f}")
    return EXIT_OK


def cmd_compare_fca(cfg: RunConfig) -> int:
    out = _out_path(cfg, "fca.csv")
    exact = simulate(cfg, fca=False)
    flat = simulate(cfg, fca=True)
    atomic_write_text(_sibling(out, "exact"), exact.to_csv())
    atomic_write_text(_sibling(out, "fca"), flat.to_csv())
    grid = band_grid(cfg)
    rows = [DENSITY_CSV_HEADER]
    for fca in (False, True):
        rows += density_model(cfg, fca).to_csv_rows(grid)
    atomic_write_text(_sibling(out, "density"), "\n".join(rows) + "\n")
    t_ex = first_local_minimum(exact.times, exact.p1)
    t_fc = first_local_minimum(flat.times, flat.p1)
    shift = phase_shift(t_ex, t_fc)
    sign = "positive" if shift > 0 else "negative" if shift < 0 else "zero"
    print(f"first minimum of p1: exact {t_ex:.4f} fs, fca {t_fc:.4f} fs")
    print(f"phase shift {shift:+.4f} fs ({sign})")
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    results = run_checks()
    print(format_table(results))
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VALIDATION if failed else EXIT_OK


COMMANDS = {
    "enhance": cmd_enhance,
    "simulate": cmd_simulate,
    "compare-fca": cmd_compare_fca,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = load_config(args.config, args.overrides)
        if args.out:
            cfg = with_values(cfg, output=args.out)
    except (ParseError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.subcommand](cfg)
    except (ConvergenceError, NumericError, ResourceError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ParseError, ConfigError, DomainError, RangeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def echo(argv=None) -> str:
    """Configuration echo for a command line, used by tests and debugging."""
    args = _parser().parse_args(argv)
    return echo_config(load_config(args.config, args.overrides))


if __name__ == "__main__":
    sys.exit(main())
