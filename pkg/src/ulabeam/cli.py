"""Command-line entry point: ``ulabeam <subcommand> ...``.

Exit codes: 0 success, 1 validation error, 2 runtime or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io as uio
from .beamformer import SteeringGrid, beam_pattern, theoretical_beam_pattern
from .errors import UlaBeamError, ValidationError
from .experiment import DEFAULT_DEGRADATION, ExperimentConfig, ingest_experiment, run_experiment
from .geometry import ArrayGeometry, is_aliased, max_unaliased_frequency, min_spacing_for, uniform_linear
from .io.export import dumps
from .metrics import compare, peak_angle
from .synthesis import DegradationSpec, LinearSweep, Reflection, SourceSpec, Tone, extract_band_segment, synthesize

log = logging.getLogger("ulabeam")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_array(p, elements=True):
    if elements:
        p.add_argument("--elements", type=int, default=2, help="number of array elements (default 2)")
    p.add_argument("--spacing", type=float, default=0.084, help="element spacing in m (default 0.084)")
    p.add_argument("--speed-of-sound", type=float, default=343.0)
    p.add_argument("--geometry", type=Path, help="geometry JSON; overrides --elements/--spacing")


def _geometry(args, n=None) -> ArrayGeometry:
    if getattr(args, "geometry", None):
        return ArrayGeometry.from_json(args.geometry.read_text())
    return uniform_linear(n or args.elements, args.spacing, args.speed_of_sound)


def _out(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_synth(args):
    geometry = _geometry(args)
    wave = Tone(args.tone) if args.tone is not None else LinearSweep(*args.sweep)
    source = SourceSpec(args.azimuth % 360.0, wave, args.amplitude, args.duration)
    degrade = DegradationSpec(args.noise_rms, tuple(Reflection(*r) for r in args.reflection or ()))
    rec = synthesize(source, geometry, args.sample_rate, degrade, seed=args.seed)
    out = _out(args)
    uio.write_wav_file(out / args.name, rec, args.bit_depth)
    meta = {
        "file": args.name,
        "geometry": geometry.to_dict(),
        "azimuth_deg": source.azimuth_deg,
        "waveform": {"tone_hz": args.tone} if args.tone is not None else {"sweep_hz": list(args.sweep)},
        "amplitude": args.amplitude,
        "duration_s": args.duration,
        "sample_rate": args.sample_rate,
        "degradation": degrade.to_dict(),
        "seed": args.seed,
    }
    (out / (Path(args.name).stem + ".json")).write_text(dumps(meta))
    print(out / args.name)


def cmd_beamform(args):
    _, rec = uio.read_wav_file(args.wav)
    geometry = _geometry(args, n=rec.n_channels)
    f = args.frequency
    if args.sweep:
        if f is None:
            raise ValidationError("--sweep needs --frequency to choose the segment")
        rec = extract_band_segment(rec, LinearSweep(*args.sweep), f, args.window, args.sweep_duration)
    p = beam_pattern(rec, geometry, SteeringGrid.uniform(args.grid_step), frequency_hz=f,
                     source_azimuth_deg=args.azimuth)
    out = _out(args)
    (out / f"{args.name}.csv").write_text(uio.beam_pattern_to_csv(p))
    (out / f"{args.name}.json").write_text(dumps(uio.beam_pattern_to_dict(p)))
    print(f"peak angle: {peak_angle(p):g} deg")


def cmd_compare(args):
    exp = uio.load_beam_pattern(args.experimental.read_text())
    if args.theoretical:
        th = uio.load_beam_pattern(args.theoretical.read_text())
    else:
        f = args.frequency or exp.frequency_hz
        if f is None:
            raise ValidationError("no --theoretical pattern: --frequency is required to model one")
        th = theoretical_beam_pattern(_geometry(args), args.azimuth, f, exp.grid)
    result = compare(th, exp)
    out = _out(args)
    doc = {
        **result.to_dict(),
        "theoretical_peak_deg": peak_angle(th),
        "experimental_peak_deg": peak_angle(exp),
        "source_azimuth_deg": args.azimuth,
    }
    (out / "comparison.json").write_text(dumps(doc))
    (out / "overlay.svg").write_text(uio.emit_beam_pattern_svg(th, exp, args.azimuth))
    print(json.dumps(result.to_dict()))


def cmd_heatmap(args):
    text = args.input.read_text()
    if args.input.suffix == ".csv":
        grid = uio.heatmap_from_csv(text)
    else:
        doc = json.loads(text)
        if "trials" in doc:
            doc = doc["trials"][args.trial - 1]["heatmap"]
        grid = uio.heatmap_from_dict(doc)
    out = _out(args)
    path = out / f"heatmap_{args.metric}.svg"
    path.write_text(uio.emit_heatmap_svg(grid, args.metric))
    print(path)


def _config(args, **extra) -> ExperimentConfig:
    base = json.loads(args.config.read_text()) if args.config else {}
    if getattr(args, "degraded", False):
        base.setdefault("degradation", DEFAULT_DEGRADATION.to_dict())
        base.setdefault("seeds", [1, 2, 3])
    overrides = {"out_dir": str(args.out_dir), "workers": args.workers, **extra}
    return ExperimentConfig.from_dict(base, **overrides)


def cmd_experiment(args):
    cfg = _config(args)
    trials = args.trials or cfg.trials
    cfg = cfg.replace(seeds=tuple(args.seed + k for k in range(trials)))
    report = run_experiment(cfg)
    _finish(report)


def cmd_ingest(args):
    report = ingest_experiment(args.directory, _config(args))
    _finish(report)


def _finish(report):
    sys.stdout.write(uio.summary_to_text(report.summary))
    for f in report.failures:
        log.warning("cell failed: %s", f)


def cmd_aliasing_check(args):
    geometry = _geometry(args)
    f_lim = max_unaliased_frequency(geometry)
    doc = {"spacing_m": geometry.spacing, "max_unaliased_frequency_hz": f_lim}
    if args.fmax is not None:
        doc["min_spacing_for_fmax_m"] = min_spacing_for(args.fmax, geometry.speed_of_sound)
        doc["fmax_hz"] = args.fmax
        doc["fmax_aliased"] = is_aliased(geometry, args.fmax)
    if args.frequency is not None:
        doc["frequency_hz"] = args.frequency
        doc["aliased"] = is_aliased(geometry, args.frequency)
    print(json.dumps(doc, indent=2))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ulabeam", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="synthesize a multichannel WAV recording")
    _add_array(s)
    s.add_argument("--azimuth", type=float, required=True, help="source azimuth from broadside (deg)")
    w = s.add_mutually_exclusive_group(required=True)
    w.add_argument("--tone", type=float, metavar="HZ")
    w.add_argument("--sweep", type=float, nargs=2, metavar=("F0", "F1"))
    s.add_argument("--duration", type=float, default=10.0)
    s.add_argument("--amplitude", type=float, default=0.5)
    s.add_argument("--sample-rate", type=int, default=96_000)
    s.add_argument("--noise-rms", type=float, default=0.0)
    s.add_argument("--reflection", type=float, nargs=3, action="append", metavar=("AZ", "GAIN", "DELAY_S"))
    s.add_argument("--bit-depth", type=int, default=16, choices=(16, 24, 32))
    s.add_argument("--name", default="recording.wav")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_synth)

    b = sub.add_parser("beamform", help="beam pattern of a WAV recording")
    b.add_argument("wav", type=Path)
    _add_array(b, elements=False)
    b.add_argument("--grid-step", type=float, default=1.0)
    b.add_argument("--frequency", type=float, help="analysis frequency (labels the pattern; picks the sweep segment)")
    b.add_argument("--sweep", type=float, nargs=2, metavar=("F0", "F1"), help="recording is a linear sweep")
    b.add_argument("--sweep-duration", type=float, help="sweep length in s (default: recording length)")
    b.add_argument("--window", type=int, default=4096)
    b.add_argument("--azimuth", type=float, help="true source azimuth, if known")
    b.add_argument("--name", default="beam_pattern")
    b.add_argument("--out-dir", required=True)
    b.set_defaults(func=cmd_beamform)

    c = sub.add_parser("compare", help="compare an experimental beam pattern against theory")
    c.add_argument("experimental", type=Path)
    c.add_argument("--theoretical", type=Path, help="pattern file; omitted = closed-form model")
    c.add_argument("--azimuth", type=float, required=True)
    c.add_argument("--frequency", type=float)
    _add_array(c)
    c.add_argument("--out-dir", required=True)
    c.set_defaults(func=cmd_compare)

    h = sub.add_parser("heatmap", help="render a heatmap SVG from heatmap.csv/json or report.json")
    h.add_argument("input", type=Path)
    h.add_argument("--metric", default="area_difference", choices=("area_difference", "rmse_percent", "peak_delta_deg"))
    h.add_argument("--trial", type=int, default=1)
    h.add_argument("--out-dir", required=True)
    h.set_defaults(func=cmd_heatmap)

    e = sub.add_parser("experiment", help="run the synthetic rotation experiment")
    e.add_argument("--config", type=Path)
    e.add_argument("--degraded", action="store_true", help="use the default reflection + noise degradation")
    e.add_argument("--trials", type=int)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--seed", type=int, required=True, help="trial k uses seed + k - 1")
    e.add_argument("--out-dir", required=True)
    e.set_defaults(func=cmd_experiment)

    i = sub.add_parser("ingest", help="analyze recorded angle_<deg>.wav files")
    i.add_argument("directory", type=Path)
    i.add_argument("--config", type=Path)
    i.add_argument("--workers", type=int, default=1)
    i.add_argument("--out-dir", required=True)
    i.set_defaults(func=cmd_ingest)

    a = sub.add_parser("aliasing-check", help="spatial aliasing limits of an array")
    _add_array(a)
    a.add_argument("--frequency", type=float)
    a.add_argument("--fmax", type=float, help="also report the largest unaliased spacing for this frequency")
    a.set_defaults(func=cmd_aliasing_check)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors exit 1, --help exits 0
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error ({exc.kind}): {exc}", file=sys.stderr)
        return 1
    except (UlaBeamError, OSError, ValueError, KeyError) as exc:
        print(f"error ({getattr(exc, 'kind', type(exc).__name__)}): {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
