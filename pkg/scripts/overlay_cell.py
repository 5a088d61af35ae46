"""Theoretical vs. degraded beam pattern for one array angle and frequency.

Writes ``overlay.svg`` plus both patterns as CSV and prints the comparison
metrics for a clean and a degraded recording.
"""
import argparse
import json
from pathlib import Path

from ulabeam.experiment import DEFAULT_DEGRADATION, ExperimentConfig, run_experiment
from ulabeam.io import beam_pattern_to_csv, emit_beam_pattern_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--angle", type=float, default=50.0)
    ap.add_argument("--frequency", type=float, default=1650.0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out-dir", type=Path, required=True)
    args = ap.parse_args()

    cell = dict(angles_deg=(args.angle,), frequencies_hz=(args.frequency,),
                overlay_cells=((args.angle, args.frequency),), seeds=(args.seed,))
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for label, deg in (("clean", ExperimentConfig().degradation), ("degraded", DEFAULT_DEGRADATION)):
        report = run_experiment(ExperimentConfig(degradation=deg, **cell))
        result = report.heatmaps[0].cells[0][0]
        th, ex = report.overlays[(1, args.angle, args.frequency)]
        d = args.out_dir / label
        d.mkdir(exist_ok=True)
        (d / "overlay.svg").write_text(emit_beam_pattern_svg(th, ex, args.angle))
        (d / "theoretical.csv").write_text(beam_pattern_to_csv(th))
        (d / "experimental.csv").write_text(beam_pattern_to_csv(ex))
        print(label, json.dumps(result.to_dict()))


if __name__ == "__main__":
    main()
