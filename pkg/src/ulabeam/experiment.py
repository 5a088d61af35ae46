"""End-to-end rotation experiment: sweep recordings at every array angle,
per-frequency beam patterns, comparison against theory, heatmaps and the
per-trial RMSE summary.

Rotating the array by ``a`` degrees is modelled as moving the source to
azimuth ``a`` in the array frame. Reflection azimuths in the configuration
are offsets from the source direction (the reflecting surface is fixed
relative to the speaker), so they rotate together with it.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .beamformer import BeamPattern, SteeringGrid, beam_pattern, theoretical_beam_pattern
from .errors import (
    ConfigValidationError,
    ExperimentFailedError,
    IncompleteDatasetError,
    ShapeError,
    UlaBeamError,
)
from .geometry import ArrayGeometry, max_unaliased_frequency, uniform_linear
from .io import export, svg
from .io.wav import read_wav_file, write_wav_file
from .metrics import ComparisonResult, HeatmapGrid, build_heatmap, compare, summarize, BandSummary
from .synthesis import (
    DegradationSpec,
    LinearSweep,
    MultichannelRecording,
    Reflection,
    SourceSpec,
    extract_band_segment,
    synthesize,
)

log = logging.getLogger(__name__)

ANGLE_FILE = re.compile(r"^angle_(\d+(?:\.\d+)?)\.wav$")
TRIAL_DIR = re.compile(r"^trial_(\d+)$")

DEFAULT_DEGRADATION = DegradationSpec(
    noise_rms=0.02,
    reflections=(Reflection(azimuth_deg=60.0, gain=0.3, extra_delay_s=0.0021),),
)


def _frange(lo, hi, step):
    return tuple(float(x) for x in np.arange(lo, hi + step / 2, step))


@dataclass(frozen=True)
class ExperimentConfig:
    n_elements: int = 2
    spacing_m: float = 0.084
    speed_of_sound: float = 343.0
    angles_deg: tuple[float, ...] = _frange(0, 340, 20)
    frequencies_hz: tuple[float, ...] = _frange(500, 3000, 100)
    sweep_f0: float = 500.0
    sweep_f1: float = 3000.0
    sweep_duration_s: float = 10.0
    sample_rate: int = 96_000
    amplitude: float = 0.5
    window_len: int = 4096
    degradation: DegradationSpec = field(default_factory=DegradationSpec)
    seeds: tuple[int, ...] = (1,)
    band_hz: tuple[float, float] = (500.0, 2000.0)
    grid_step_deg: float = 1.0
    theory: str = "simulated"
    overlay_cells: tuple[tuple[float, float], ...] = ((60.0, 1650.0),)
    write_wavs: bool = True
    bit_depth: int = 16
    workers: int = 1
    out_dir: str | None = None

    def __post_init__(self):
        fix = lambda name, conv: object.__setattr__(self, name, conv(getattr(self, name)))
        fix("angles_deg", lambda v: tuple(float(a) for a in v))
        fix("frequencies_hz", lambda v: tuple(float(f) for f in v))
        fix("seeds", lambda v: tuple(int(s) for s in v))
        fix("band_hz", lambda v: tuple(float(f) for f in v))
        fix("overlay_cells", lambda v: tuple((float(a), float(f)) for a, f in v))
        if isinstance(self.degradation, dict):
            fix("degradation", DegradationSpec.from_dict)
        self.validate()

    def validate(self):
        def bad(msg):
            raise ConfigValidationError(msg)

        if not self.angles_deg:
            bad("angle list is empty")
        if not self.frequencies_hz:
            bad("frequency list is empty")
        if len(set(self.angles_deg)) != len(self.angles_deg) or len(set(self.frequencies_hz)) != len(self.frequencies_hz):
            bad("angle and frequency lists must not contain duplicates")
        if any(not 0 <= a < 360 for a in self.angles_deg):
            bad("array angles must lie in [0, 360)")
        if not self.seeds:
            bad("at least one trial (seed) is required")
        if not self.sweep_f1 > self.sweep_f0 > 0:
            bad("sweep needs f1 > f0 > 0")
        outside = [f for f in self.frequencies_hz if not self.sweep_f0 <= f <= self.sweep_f1]
        if outside:
            bad(f"frequencies outside the {self.sweep_f0:g}-{self.sweep_f1:g} Hz sweep: {outside}")
        if self.sample_rate < 2 * self.sweep_f1:
            bad(f"sample rate {self.sample_rate} Hz is below twice the sweep top {self.sweep_f1} Hz")
        if self.n_elements < 2 or not self.spacing_m > 0 or not self.speed_of_sound > 0:
            bad("array needs n_elements >= 2 and positive spacing and speed of sound")
        if self.window_len > self.sweep_duration_s * self.sample_rate:
            bad("analysis window is longer than the sweep")
        if self.theory not in ("simulated", "closed_form"):
            bad(f"theory must be 'simulated' or 'closed_form', got {self.theory!r}")
        if self.bit_depth not in (16, 24, 32):
            bad("bit_depth must be 16, 24 or 32")
        if len(self.band_hz) != 2 or self.band_hz[0] > self.band_hz[1]:
            bad("band_hz must be [low, high]")
        stray = [c for c in self.overlay_cells if c[0] not in self.angles_deg or not self.sweep_f0 <= c[1] <= self.sweep_f1]
        if stray:
            bad(f"overlay cells need a configured angle and a frequency inside the sweep: {stray}")
        if not 0 < self.grid_step_deg <= 90:
            bad("grid_step_deg must lie in (0, 90]")

    @property
    def trials(self) -> int:
        return len(self.seeds)

    @property
    def geometry(self) -> ArrayGeometry:
        return uniform_linear(self.n_elements, self.spacing_m, self.speed_of_sound)

    @property
    def sweep(self) -> LinearSweep:
        return LinearSweep(self.sweep_f0, self.sweep_f1)

    @property
    def grid(self) -> SteeringGrid:
        return SteeringGrid.uniform(self.grid_step_deg)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d["degradation"] = self.degradation.to_dict()
        for k in ("angles_deg", "frequencies_hz", "seeds", "band_hz"):
            d[k] = list(d[k])
        d["overlay_cells"] = [list(c) for c in self.overlay_cells]
        return d

    @classmethod
    def from_dict(cls, d: dict, **overrides) -> "ExperimentConfig":
        d = {**d, **{k: v for k, v in overrides.items() if v is not None}}
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigValidationError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, UlaBeamError):
                raise
            raise ConfigValidationError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str, **overrides) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text), **overrides)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def degraded_config(**changes) -> ExperimentConfig:
    """Three seeded trials with the default reflection and noise."""
    return ExperimentConfig(degradation=DEFAULT_DEGRADATION, seeds=(1, 2, 3), **changes)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    heatmaps: list[HeatmapGrid]
    summary: BandSummary
    failures: list[dict]
    overlays: dict = field(default_factory=dict)
    source: str = "synthetic"

    def aliasing_split(self, metric: str = "area_difference") -> list[dict]:
        """Per-trial mean of ``metric`` below and above the aliasing limit."""
        f_lim = max_unaliased_frequency(self.config.geometry)
        out = []
        for h in self.heatmaps:
            vals = h.metric(metric)
            freqs = np.asarray(h.frequencies_hz)
            below, above = vals[:, freqs < f_lim], vals[:, freqs >= f_lim]
            mean = lambda v: float(np.nanmean(v)) if np.any(np.isfinite(v)) else None
            out.append({"below": mean(below), "above": mean(above)})
        return out

    def to_dict(self) -> dict:
        geom = self.config.geometry
        return {
            "source": self.source,
            "config": _portable(self.config),
            "geometry": geom.to_dict(),
            "max_unaliased_frequency_hz": max_unaliased_frequency(geom),
            "trials": [
                {"trial": i + 1, "heatmap": export.heatmap_to_dict(h), "aliasing_split": split}
                for i, (h, split) in enumerate(zip(self.heatmaps, self.aliasing_split()))
            ],
            "summary": export.summary_to_dict(self.summary),
            "failures": self.failures,
        }


def _frequencies_for(cfg: ExperimentConfig, angle: float) -> list[float]:
    extra = [f for a, f in cfg.overlay_cells if a == angle and f not in cfg.frequencies_hz]
    return list(cfg.frequencies_hz) + extra


def _theory_patterns(cfg: ExperimentConfig, angles) -> dict:
    """Theoretical pattern per (angle, frequency), shared by all trials.

    ``theory="simulated"`` beamforms a noise-free, reflection-free sweep
    through the same segment extraction as the measured data.
    """
    geometry, grid = cfg.geometry, cfg.grid

    def for_angle(angle):
        if cfg.theory == "closed_form":
            return {f: theoretical_beam_pattern(geometry, angle, f, grid) for f in _frequencies_for(cfg, angle)}
        ideal = synthesize(_source(cfg, angle), geometry, cfg.sample_rate)
        out = {}
        for f in _frequencies_for(cfg, angle):
            seg = extract_band_segment(ideal, cfg.sweep, f, cfg.window_len, cfg.sweep_duration_s)
            out[f] = beam_pattern(seg, geometry, grid, frequency_hz=f, source_azimuth_deg=angle)
        return out

    table = {}
    for angle, pats in zip(angles, _map(for_angle, angles, cfg.workers)):
        for f, p in pats.items():
            table[(angle, f)] = p
    return table


def _map(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _source(cfg: ExperimentConfig, angle: float) -> SourceSpec:
    return SourceSpec(angle, cfg.sweep, cfg.amplitude, cfg.sweep_duration_s)


def rotated_degradation(deg: DegradationSpec, angle: float) -> DegradationSpec:
    """Express source-relative reflection azimuths in the array frame."""
    refl = tuple(
        Reflection(float(np.mod(angle + r.azimuth_deg, 360.0)), r.gain, r.extra_delay_s) for r in deg.reflections
    )
    return DegradationSpec(deg.noise_rms, refl)


def _failure(trial, angle, f, exc, filename=None) -> dict:
    d = {
        "trial": trial,
        "array_angle_deg": angle,
        "frequency_hz": f,
        "kind": getattr(exc, "kind", type(exc).__name__),
        "message": str(exc),
    }
    if filename is not None:
        d["file"] = filename
    return d


def _analyze(rec, angle, trial, cfg, theory, overlays):
    """Compare every configured frequency of one recording against theory."""
    results, failures = {}, []
    geometry, grid = cfg.geometry, cfg.grid
    if rec.n_channels != geometry.n_elements:
        exc = ShapeError(f"recording has {rec.n_channels} channels, array has {geometry.n_elements} elements")
        return {f: None for f in cfg.frequencies_hz}, [_failure(trial, angle, None, exc)]

    def experimental(f):
        seg = extract_band_segment(rec, cfg.sweep, f, cfg.window_len, cfg.sweep_duration_s)
        return beam_pattern(seg, geometry, grid, frequency_hz=f, source_azimuth_deg=angle)

    for f in cfg.frequencies_hz:
        try:
            results[f] = compare(theory[(angle, f)], experimental(f))
        except (UlaBeamError, ValueError) as exc:
            results[f] = None
            failures.append(_failure(trial, angle, f, exc))
    for a, f in cfg.overlay_cells:
        if a == angle:
            try:
                overlays[(trial, a, f)] = (theory[(a, f)], experimental(f))
            except (UlaBeamError, ValueError) as exc:
                failures.append(_failure(trial, angle, f, exc))
    return results, failures


def _assemble(cfg, per_trial_cells, failures, overlays, source) -> ExperimentReport:
    heatmaps = []
    for cells in per_trial_cells:
        items = [((a, f), cells[a][f]) for a in cfg.angles_deg for f in cfg.frequencies_hz]
        heatmaps.append(build_heatmap(items, cfg.angles_deg, cfg.frequencies_hz))
    if all(c is None for h in heatmaps for _, _, c in h.iter_cells()):
        raise ExperimentFailedError(f"every cell failed; first failure: {failures[0] if failures else 'n/a'}")
    failures = sorted(failures, key=lambda d: (d["trial"], d["array_angle_deg"], d["frequency_hz"] or 0.0))
    summary = summarize(heatmaps, *cfg.band_hz)
    return ExperimentReport(cfg, heatmaps, summary, failures, overlays, source)


def angle_filename(angle: float) -> str:
    return f"angle_{angle:g}.wav"


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Synthesize, analyze and (when ``cfg.out_dir`` is set) write every artifact."""
    out = Path(cfg.out_dir) if cfg.out_dir else None
    geometry = cfg.geometry
    theory = _theory_patterns(cfg, cfg.angles_deg)
    overlays, failures = {}, []
    units = [(t, s, k, a) for t, s in enumerate(cfg.seeds, start=1) for k, a in enumerate(cfg.angles_deg)]

    def work(unit):
        trial, seed, k, angle = unit
        local_overlays = {}
        try:
            degrade = rotated_degradation(cfg.degradation, angle)
            rng_seed = np.random.SeedSequence(seed, spawn_key=(k,))
            rec = synthesize(_source(cfg, angle), geometry, cfg.sample_rate, degrade, rng_seed)
            if out is not None and cfg.write_wavs:
                d = out / f"trial_{trial}"
                d.mkdir(parents=True, exist_ok=True)
                write_wav_file(d / angle_filename(angle), rec, cfg.bit_depth)
            res, fails = _analyze(rec, angle, trial, cfg, theory, local_overlays)
        except (UlaBeamError, ValueError) as exc:
            res, fails = {f: None for f in cfg.frequencies_hz}, [_failure(trial, angle, None, exc)]
        return unit, res, fails, local_overlays

    per_trial = [dict() for _ in cfg.seeds]
    for (trial, _, _, angle), res, fails, ov in _map(work, units, cfg.workers):
        per_trial[trial - 1][angle] = res
        failures.extend(fails)
        overlays.update(ov)
    report = _assemble(cfg, per_trial, failures, overlays, "synthetic")
    if out is not None:
        write_report(report, out)
    return report


def _discover(directory: Path, angles) -> list[tuple[int, Path]]:
    trial_dirs = sorted(
        ((int(m.group(1)), p) for p in directory.iterdir() if p.is_dir() and (m := TRIAL_DIR.match(p.name))),
        key=lambda x: x[0],
    )
    if not trial_dirs:
        trial_dirs = [(1, directory)]
    for _, d in trial_dirs:
        present = {float(m.group(1)) for p in d.iterdir() if (m := ANGLE_FILE.match(p.name))}
        missing = [a for a in angles if a not in present]
        if missing:
            raise IncompleteDatasetError(missing, d)
    return trial_dirs


def ingest_experiment(directory, cfg: ExperimentConfig) -> ExperimentReport:
    """Analyze recorded ``angle_<deg>.wav`` files instead of synthesizing.

    ``directory`` holds either the files themselves (one trial) or
    ``trial_<k>`` subdirectories. Every configured angle must be present in
    every trial; an unreadable file fails that angle's cells only.
    """
    directory = Path(directory)
    trial_dirs = _discover(directory, cfg.angles_deg)
    cfg = cfg.replace(seeds=tuple(k for k, _ in trial_dirs))
    theory = _theory_patterns(cfg, cfg.angles_deg)
    overlays, failures = {}, []
    units = [(i, d, a) for i, (_, d) in enumerate(trial_dirs, start=1) for a in cfg.angles_deg]

    def work(unit):
        trial, d, angle = unit
        local_overlays = {}
        path = d / angle_filename(angle)
        try:
            _, rec = read_wav_file(path)
            if rec.sample_rate != cfg.sample_rate:
                raise ShapeError(f"{path.name}: sample rate {rec.sample_rate:g} Hz, expected {cfg.sample_rate}")
            res, fails = _analyze(rec, angle, trial, cfg, theory, local_overlays)
        except (UlaBeamError, ValueError) as exc:
            res, fails = {f: None for f in cfg.frequencies_hz}, [_failure(trial, angle, None, exc, str(path))]
        return unit, res, fails, local_overlays

    per_trial = [dict() for _ in trial_dirs]
    for (trial, _, angle), res, fails, ov in _map(work, units, cfg.workers):
        per_trial[trial - 1][angle] = res
        failures.extend(fails)
        overlays.update(ov)
    report = _assemble(cfg, per_trial, failures, overlays, "recorded")
    if cfg.out_dir:
        write_report(report, Path(cfg.out_dir))
    return report


def _portable(cfg: ExperimentConfig) -> dict:
    # the output location is a run-time choice, not part of the experiment
    d = cfg.to_dict()
    d.pop("out_dir")
    return d


def write_report(report: ExperimentReport, out: Path) -> None:
    """Write JSON/CSV/SVG/text artifacts under ``out`` with fixed names."""
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(export.dumps(_portable(report.config)))
    (out / "report.json").write_text(export.dumps(report.to_dict()))
    (out / "summary.json").write_text(export.dumps(export.summary_to_dict(report.summary)))
    (out / "summary.txt").write_text(export.summary_to_text(report.summary))
    for i, h in enumerate(report.heatmaps, start=1):
        d = out / f"trial_{i}"
        d.mkdir(exist_ok=True)
        (d / "heatmap.csv").write_text(export.heatmap_to_csv(h))
        (d / "heatmap.json").write_text(export.dumps(export.heatmap_to_dict(h)))
        for metric in ("area_difference", "rmse_percent"):
            (d / f"heatmap_{metric}.svg").write_text(
                svg.emit_heatmap_svg(h, metric, title=f"Trial {i}: {svg.METRIC_LABELS[metric]}"))
    for (trial, angle, f), (th, exp) in sorted(report.overlays.items()):
        d = out / f"trial_{trial}"
        stem = f"a{angle:g}_f{f:g}"
        (d / f"overlay_{stem}.svg").write_text(svg.emit_beam_pattern_svg(th, exp, angle))
        (d / f"pattern_{stem}_theoretical.csv").write_text(export.beam_pattern_to_csv(th))
        (d / f"pattern_{stem}_experimental.csv").write_text(export.beam_pattern_to_csv(exp))
