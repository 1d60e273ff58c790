"""Run every experiment subcommand against one config and write one CSV each.

    python3 scripts/run_all.py configs/default.ini results/ --jobs 2
"""

import argparse
import sys
from pathlib import Path

from congsum.cli import SUBCOMMANDS, main


def run(config: str, outdir: Path, jobs: int | None, seed: int | None) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for sub in SUBCOMMANDS:
        argv = [sub, "--config", config, "--out", str(outdir / f"{sub}.csv"),
                "--cache", str(outdir / "kloosterman_cache")]
        if jobs is not None:
            argv += ["--jobs", str(jobs)]
        if seed is not None:
            argv += ["--seed", str(seed)]
        code = main(argv)
        print(f"{sub:12s} exit {code}", file=sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--jobs", type=int)
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()
    sys.exit(run(args.config, args.outdir, args.jobs, args.seed))
