"""Beam-pattern comparison metrics and the (array angle x frequency) grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .beamformer import BeamPattern, analysis_span, compensation_delays, delay_and_sum, reference_delay_samples
from .errors import IncompleteGridError, ShapeError, UndefinedSNRError
from .geometry import ArrayGeometry
from .synthesis import MultichannelRecording, sin_deg


@dataclass(frozen=True)
class ComparisonResult:
    peak_delta_deg: float
    area_difference: float
    rmse_percent: float

    def to_dict(self) -> dict:
        return {
            "peak_delta_deg": self.peak_delta_deg,
            "area_difference": self.area_difference,
            "rmse_percent": self.rmse_percent,
        }


def _values(p):
    return p.values if isinstance(p, BeamPattern) else np.asarray(p, dtype=float).ravel()


def _pair(a, b):
    if isinstance(a, BeamPattern) and isinstance(b, BeamPattern) and a.grid != b.grid:
        raise ShapeError("beam patterns are on different steering grids")
    va, vb = _values(a), _values(b)
    if va.shape != vb.shape:
        raise ShapeError(f"pattern lengths differ: {va.size} vs {vb.size}")
    return va, vb


def peak_angle(p: BeamPattern) -> float:
    """Grid angle of the maximum; ties go to the smallest angle."""
    return float(p.angles_deg[int(np.argmax(p.values))])


def fold_to_broadside(angle_deg):
    """Map an azimuth to [-90, 90] so that ``a`` and ``180 - a`` coincide."""
    return np.degrees(np.arcsin(np.clip(sin_deg(angle_deg), -1.0, 1.0)))


def peak_delta(a_deg: float, b_deg: float) -> float:
    """Smallest angular distance between ``a`` and ``b`` or ``b``'s mirror image."""
    return float(abs(fold_to_broadside(a_deg) - fold_to_broadside(b_deg)))


def area_difference(a, b) -> float:
    """Mean absolute difference of two max-normalized patterns, in [0, 1]."""
    va, vb = _pair(a, b)
    return float(np.mean(np.abs(va - vb)))


def rmse(a, b) -> float:
    """Root-mean-square difference as a percentage of the normalized scale."""
    va, vb = _pair(a, b)
    return float(100.0 * np.sqrt(np.mean((va - vb) ** 2)))


def compare(theoretical: BeamPattern, experimental: BeamPattern) -> ComparisonResult:
    _pair(theoretical, experimental)
    return ComparisonResult(
        peak_delta(peak_angle(theoretical), peak_angle(experimental)),
        area_difference(theoretical, experimental),
        rmse(theoretical, experimental),
    )


def _power(x, span):
    seg = x[span[0]:span[1]]
    return float(np.mean(seg * seg))


def array_gain(
    clean: MultichannelRecording,
    noisy: MultichannelRecording,
    geometry: ArrayGeometry,
    steer_deg: float,
    interpolation: str = "cubic",
) -> float:
    """SNR of the steered array output divided by the SNR of element 0.

    Noise is ``noisy - clean``. Powers are averaged over the analysis span
    the beam patterns use; the array output is read ``D`` samples later
    because steering delays every channel by the whole-sample reference ``D``.
    """
    if clean.channels.shape != noisy.channels.shape or clean.sample_rate != noisy.sample_rate:
        raise ShapeError("clean and noisy recordings must have the same shape and sample rate")
    fs = clean.sample_rate
    span = analysis_span(geometry, fs, clean.n_samples)
    noise = MultichannelRecording(fs, noisy.channels - clean.channels)

    p_sig = _power(clean.channels[0], span)
    p_noise = _power(noise.channels[0], span)
    delays = compensation_delays(geometry, steer_deg, fs) / fs
    ref = reference_delay_samples(geometry, fs)
    out_span = (span[0] + ref, span[1] + ref)
    out_sig = _power(delay_and_sum(clean, delays, interpolation), out_span)
    out_noise = _power(delay_and_sum(noise, delays, interpolation), out_span)
    if p_noise == 0 or out_noise == 0:
        raise UndefinedSNRError("noise power is zero; SNR is undefined")
    if p_sig == 0:
        raise UndefinedSNRError("signal power is zero; SNR ratio is undefined")
    return (out_sig / out_noise) / (p_sig / p_noise)


@dataclass(frozen=True)
class HeatmapGrid:
    """``cells[i][j]`` compares patterns at ``array_angles_deg[i]``, ``frequencies_hz[j]``.

    A cell is ``None`` when its computation failed.
    """

    array_angles_deg: tuple[float, ...]
    frequencies_hz: tuple[float, ...]
    cells: tuple[tuple[ComparisonResult | None, ...], ...]

    def __post_init__(self):
        if len(self.cells) != len(self.array_angles_deg) or any(
            len(row) != len(self.frequencies_hz) for row in self.cells
        ):
            raise ShapeError("cells must be |angles| x |frequencies|")

    @property
    def shape(self):
        return len(self.array_angles_deg), len(self.frequencies_hz)

    def metric(self, name: str) -> np.ndarray:
        """``name`` field of every cell as a float array (NaN for failed cells)."""
        return np.array(
            [[np.nan if c is None else getattr(c, name) for c in row] for row in self.cells],
            dtype=float,
        )

    def band_mean(self, name: str, f_lo: float, f_hi: float) -> float:
        """Mean of ``name`` over cells with ``f_lo <= f <= f_hi`` (failed cells skipped)."""
        cols = [j for j, f in enumerate(self.frequencies_hz) if f_lo <= f <= f_hi]
        vals = self.metric(name)[:, cols]
        return float(np.nanmean(vals)) if np.any(np.isfinite(vals)) else float("nan")

    def iter_cells(self):
        for i, a in enumerate(self.array_angles_deg):
            for j, f in enumerate(self.frequencies_hz):
                yield a, f, self.cells[i][j]


def build_heatmap(cells, angles=None, frequencies=None) -> HeatmapGrid:
    """Assemble a :class:`HeatmapGrid` from ``((angle, frequency), result)`` items.

    ``cells`` may be a mapping or an iterable of pairs; a ``None`` result
    marks a failed cell. Axes default to the sorted distinct coordinates.
    Missing or duplicated coordinates raise :class:`IncompleteGridError`.
    """
    items = list(cells.items()) if isinstance(cells, Mapping) else list(cells)
    table = {}
    for (a, f), result in items:
        key = (float(a), float(f))
        if key in table:
            raise IncompleteGridError(f"duplicate cell at angle {a:g}, frequency {f:g}")
        table[key] = result
    angles = tuple(sorted({k[0] for k in table})) if angles is None else tuple(map(float, angles))
    frequencies = tuple(sorted({k[1] for k in table})) if frequencies is None else tuple(map(float, frequencies))
    if not angles or not frequencies:
        raise IncompleteGridError("heatmap needs at least one cell")
    missing = [(a, f) for a in angles for f in frequencies if (a, f) not in table]
    if missing:
        raise IncompleteGridError(f"{len(missing)} missing cells, first at {missing[0]}")
    if len(table) != len(angles) * len(frequencies):
        raise IncompleteGridError("cells outside the requested axes")
    rows = tuple(tuple(table[(a, f)] for f in frequencies) for a in angles)
    return HeatmapGrid(angles, frequencies, rows)


@dataclass(frozen=True)
class BandSummary:
    """Per-trial averages of one metric over a frequency band, plus their mean."""

    metric: str
    band_hz: tuple[float, float]
    trial_averages: tuple[float, ...]

    @property
    def overall(self) -> float:
        return float(np.mean(self.trial_averages))


def summarize(heatmaps, f_lo: float = 500.0, f_hi: float = 2000.0, metric: str = "rmse_percent") -> BandSummary:
    """Average ``metric`` over ``f_lo <= f <= f_hi`` for each trial's heatmap."""
    return BandSummary(metric, (float(f_lo), float(f_hi)), tuple(h.band_mean(metric, f_lo, f_hi) for h in heatmaps))
