"""congsum <subcommand> --config <path> [--seed N] [--out <path>] [--jobs N] [--cache <dir>]"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .acceptance import run_checks
from .config import ExperimentConfig, load_config, parse_config
from .csvio import write_rows
from .errors import ConfigError
from .parallel import resolve_jobs

DEFAULT_CONFIG = """\
[general]
seed = 1
"""

SUBCOMMANDS = ("jcount", "jsweep", "lattice", "weil", "kloosterman", "bilinear", "trilinear", "verify")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="congsum", description=__doc__)
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="INI experiment config (built-in defaults, seed 1, when omitted)")
    ap.add_argument("--seed", type=int, help="overrides [general] seed")
    ap.add_argument("--out", help="CSV destination (default stdout)")
    ap.add_argument("--jobs", type=int, help="worker processes (fallback: CONGSUM_JOBS, then 1)")
    ap.add_argument("--cache", help="directory for Kloosterman table files")
    return ap


def _run(sub: str, cfg: ExperimentConfig, jobs: int, cache: str | None) -> tuple[list[dict], bool]:
    if sub == "jcount":
        return harness.run_jcount(cfg)
    if sub == "jsweep":
        return harness.run_jsweep(cfg, jobs), True
    if sub == "lattice":
        return harness.run_lattice(cfg, jobs), True
    if sub == "weil":
        return harness.run_weil(cfg, jobs), True
    if sub == "kloosterman":
        return harness.run_kloosterman(cfg, jobs, cache), True
    if sub == "bilinear":
        return harness.run_bilinear(cfg, jobs, cache), True
    if sub == "trilinear":
        return harness.run_trilinear(cfg, jobs), True
    rows = run_checks(cfg.verify, cfg.seed, jobs)
    for r in rows:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"[{status}] criterion {r['criterion']}: {r['check']} = {r['value']} (threshold {r['threshold']})",
              file=sys.stderr)
    return rows, all(r["passed"] for r in rows)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = load_config(args.config, seed=args.seed)
        else:
            cfg = parse_config(DEFAULT_CONFIG, "<defaults>", seed=args.seed)
    except ConfigError as exc:
        print(f"congsum: config error: {exc}", file=sys.stderr)
        return 2
    jobs = resolve_jobs(args.jobs if args.jobs is not None else cfg.jobs)
    rows, ok = _run(args.subcommand, cfg, jobs, args.cache)
    if args.out and args.out != "-":
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            write_rows(rows, fh)
    else:
        write_rows(rows, sys.stdout)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
