"""Run every sweep config in configs/ (or the ones given) into results/<name>.csv."""

import argparse
import time
from pathlib import Path

from crn_multicast.experiment import parse_config, run_sweep

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("configs", nargs="*", type=Path, help="TOML files (default: configs/*.toml)")
    ap.add_argument("--out-dir", type=Path, default=ROOT / "results")
    ap.add_argument("--trials", type=int, help="override num_trials for a quick pass")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    paths = args.configs or sorted((ROOT / "configs").glob("*.toml"))
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for path in paths:
        params, spec = parse_config(path)
        changes = {}
        if args.trials:
            changes["num_trials"] = args.trials
        if args.seed is not None:
            changes["master_seed"] = args.seed
        params = params.replace(**changes)
        out = args.out_dir / f"{path.stem}.csv"
        t0 = time.perf_counter()
        run_sweep(params, spec, out, workers=args.workers)
        print(f"{path.name} -> {out} ({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
