"""Run the rotation experiment and print the per-trial RMSE table.

    python scripts/rmse_table.py --out-dir runs/rmse
    python scripts/rmse_table.py --clean --trials 1 --out-dir runs/clean
"""
import argparse
import json
import time
from pathlib import Path

from ulabeam.experiment import ExperimentConfig, degraded_config, run_experiment
from ulabeam.io import summary_to_text


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, help="JSON config (default: built-in degraded config)")
    ap.add_argument("--clean", action="store_true", help="no reflections or noise")
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--no-wavs", action="store_true", help="skip writing the per-angle WAV files")
    ap.add_argument("--out-dir", type=Path, required=True)
    args = ap.parse_args()

    if args.config:
        cfg = ExperimentConfig.from_json(args.config.read_text())
    else:
        cfg = ExperimentConfig() if args.clean else degraded_config()
    cfg = cfg.replace(
        seeds=tuple(args.seed + k for k in range(args.trials)),
        workers=args.workers,
        write_wavs=not args.no_wavs,
        out_dir=str(args.out_dir),
    )
    t0 = time.perf_counter()
    report = run_experiment(cfg)
    print(summary_to_text(report.summary), end="")
    print("area difference below/above the aliasing limit:")
    for k, split in enumerate(report.aliasing_split(), start=1):
        print(f"  trial {k}: {split['below']:.4f} / {split['above']:.4f}")
    if report.failures:
        print(f"{len(report.failures)} failed cells, see report.json")
    print(f"artifacts in {args.out_dir} ({time.perf_counter() - t0:.1f} s)")
    print(json.dumps({"overall_rmse_percent": round(report.summary.overall, 2)}))


if __name__ == "__main__":
    main()
