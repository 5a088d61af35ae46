"""Time-domain delay-and-sum beamforming and beam patterns.

Steering to angle ``theta`` time-aligns a plane wave from ``theta`` by
delaying channel ``i`` by ``D - tau_i(theta)``, where ``tau_i`` are the arrival
delays from :func:`steering_delays` and ``D`` is a fixed whole-sample
reference (the array's acoustic transit time, rounded up) that keeps every
applied delay non-negative and identical in reference across steering angles.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .delay import fractional_delay, shift_basis, shifted_windows
from .errors import DegenerateSignalError, InvalidFrequencyError, ShapeError, ValidationError
from .geometry import ArrayGeometry
from .synthesis import (
    DEFAULT_SAMPLE_RATE,
    MultichannelRecording,
    SourceSpec,
    Tone,
    sin_deg,
    synthesize,
)

EDGE_S = 1e-3
CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True, eq=False)
class SteeringGrid:
    angles_deg: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles_deg, dtype=float).ravel()
        if a.size == 0:
            raise ValidationError("steering grid is empty")
        if np.any(np.diff(a) <= 0):
            raise ValidationError("steering angles must be strictly increasing")
        if a[0] < 0 or a[-1] >= 360:
            raise ValidationError("steering angles must lie in [0, 360)")
        a.setflags(write=False)
        object.__setattr__(self, "angles_deg", a)

    @classmethod
    def uniform(cls, step_deg: float = 1.0, start: float = 0.0, stop: float = 360.0) -> "SteeringGrid":
        n = int(round((stop - start) / step_deg))
        return cls(start + step_deg * np.arange(n))

    def __len__(self):
        return self.angles_deg.size

    def __eq__(self, other):
        return isinstance(other, SteeringGrid) and np.array_equal(self.angles_deg, other.angles_deg)

    def __hash__(self):
        return hash(self.angles_deg.tobytes())

    @property
    def step(self) -> float:
        return float(np.median(np.diff(self.angles_deg))) if len(self) > 1 else 360.0


@dataclass(frozen=True, eq=False)
class BeamPattern:
    """Max-normalized output power over a steering grid."""

    grid: SteeringGrid
    values: np.ndarray
    frequency_hz: float | None = None
    source_azimuth_deg: float | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size != len(self.grid):
            raise ShapeError(f"{v.size} values for a grid of {len(self.grid)} angles")
        if np.any(~np.isfinite(v)) or np.any(v < 0) or np.any(v > 1 + 1e-12):
            raise ValidationError("beam pattern values must lie in [0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_power(cls, grid, power, frequency_hz=None, source_azimuth_deg=None) -> "BeamPattern":
        p = np.clip(np.asarray(power, dtype=float), 0.0, None)
        peak = p.max()
        if not peak > 0:
            raise DegenerateSignalError("beam pattern power is zero everywhere; cannot normalize")
        return cls(grid, p / peak, frequency_hz, source_azimuth_deg)

    @property
    def angles_deg(self) -> np.ndarray:
        return self.grid.angles_deg


def steering_delays(geometry: ArrayGeometry, steer_deg) -> np.ndarray:
    """Arrival delays (s) relative to element 0 for a plane wave from ``steer_deg``.

    A scalar angle gives shape ``(n_elements,)``; an array of angles gives
    ``(n_angles, n_elements)``.
    """
    s = sin_deg(steer_deg)
    x = geometry.positions
    return np.multiply.outer(s, x - x[0]) / geometry.speed_of_sound


def reference_delay_samples(geometry: ArrayGeometry, sample_rate: float) -> int:
    return int(math.ceil(geometry.aperture / geometry.speed_of_sound * sample_rate))


def compensation_delays(geometry: ArrayGeometry, steer_deg, sample_rate: float) -> np.ndarray:
    """Delays in samples that align a wave from ``steer_deg`` (all >= 0)."""
    return reference_delay_samples(geometry, sample_rate) - steering_delays(geometry, steer_deg) * sample_rate


def delay_and_sum(rec: MultichannelRecording, delays, interpolation: str = "cubic") -> np.ndarray:
    """``(1/N) * sum_i channel_i(t - delays[i])`` with delays in seconds.

    Output has the input length; samples shifted in from outside are zero.
    """
    delays = np.asarray(delays, dtype=float).ravel()
    if delays.size != rec.n_channels:
        raise ShapeError(f"{delays.size} delays for {rec.n_channels} channels")
    if rec.n_samples == 0:
        raise ShapeError("recording is empty")
    out = np.zeros(rec.n_samples)
    for ch, d in zip(rec.channels, delays):
        out += fractional_delay(ch, d * rec.sample_rate, interpolation)
    return out / rec.n_channels


def analysis_span(geometry: ArrayGeometry, sample_rate: float, n_samples: int, edge_s: float = EDGE_S):
    """``(start, stop)`` of the samples used for power estimates.

    Excludes ``edge_s`` at each end plus enough extra to cover the steering
    transient (up to twice the array transit time) and the zero-filled start
    of a synthesized recording.
    """
    transit = geometry.aperture / geometry.speed_of_sound * sample_rate
    margin = int(math.ceil(edge_s * sample_rate)) + int(math.ceil(3 * transit)) + 5
    if n_samples - 2 * margin < 16:
        raise ShapeError(
            f"recording of {n_samples} samples is too short; {2 * margin} edge samples are excluded"
        )
    return margin, n_samples - margin


def _weights(length: int, taper: str) -> np.ndarray:
    if taper == "hann":
        return np.hanning(length + 2)[1:-1]
    if taper in ("none", "rect"):
        return np.ones(length)
    raise ValueError(f"unknown taper {taper!r}")


def steered_power(
    rec: MultichannelRecording,
    geometry: ArrayGeometry,
    angles_deg,
    *,
    interpolation: str = "cubic",
    taper: str = "hann",
    edge_s: float = EDGE_S,
    workers: int = 1,
) -> np.ndarray:
    """Mean-square delay-and-sum output for each steering angle.

    Equivalent to running :func:`delay_and_sum` with
    :func:`compensation_delays` per angle and averaging the squared output
    over :func:`analysis_span`, but only the analysis span is computed.
    """
    if rec.n_channels != geometry.n_elements:
        raise ShapeError(f"{rec.n_channels} channels for a {geometry.n_elements}-element array")
    angles = np.atleast_1d(np.asarray(angles_deg, dtype=float))
    fs = rec.sample_rate
    start, stop = analysis_span(geometry, fs, rec.n_samples, edge_s)
    length = stop - start
    w = _weights(length, taper)
    w = w / w.sum()
    shifts = compensation_delays(geometry, angles, fs)

    def run(sl):
        acc = np.zeros((sl.stop - sl.start, length))
        for i, ch in enumerate(rec.channels):
            d = shifts[sl, i]
            if np.unique(np.floor(d)).size * 4 <= d.size:
                rows, coeffs = shift_basis(ch, d, start, length, interpolation)
                acc += coeffs @ rows
            else:
                acc += shifted_windows(ch, d, start, length, interpolation)
        acc /= rec.n_channels
        return (acc * acc) @ w

    chunk = max(1, CHUNK_ELEMENTS // length)
    slices = [slice(i, min(i + chunk, angles.size)) for i in range(0, angles.size, chunk)]
    if workers > 1 and len(slices) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, slices))
    else:
        parts = [run(sl) for sl in slices]
    return np.concatenate(parts)


def beam_pattern(
    rec: MultichannelRecording,
    geometry: ArrayGeometry,
    grid: SteeringGrid | None = None,
    *,
    frequency_hz: float | None = None,
    source_azimuth_deg: float | None = None,
    **kwargs,
) -> BeamPattern:
    """Normalized steered-response power of ``rec`` over ``grid``.

    Keyword arguments are forwarded to :func:`steered_power`.
    """
    grid = grid or SteeringGrid.uniform()
    if not np.any(rec.channels):
        raise DegenerateSignalError("recording is all zeros")
    power = steered_power(rec, geometry, grid.angles_deg, **kwargs)
    return BeamPattern.from_power(grid, power, frequency_hz, source_azimuth_deg)


def closed_form_power(geometry: ArrayGeometry, source_azimuth_deg: float, f: float, angles_deg) -> np.ndarray:
    """Narrowband response ``|mean_i exp(j 2 pi f (tau_i(src) - tau_i(theta)))|^2``."""
    tau_s = steering_delays(geometry, source_azimuth_deg)
    tau = steering_delays(geometry, np.asarray(angles_deg, dtype=float))
    phase = np.exp(2j * np.pi * f * (tau_s[None, :] - tau))
    return np.abs(phase.mean(axis=1)) ** 2


def theoretical_beam_pattern(
    geometry: ArrayGeometry,
    source_azimuth_deg: float,
    f: float,
    grid: SteeringGrid | None = None,
    *,
    method: str = "closed_form",
    sample_rate: float = DEFAULT_SAMPLE_RATE,
    duration_s: float = 0.1,
    **kwargs,
) -> BeamPattern:
    """Beam pattern of a single ideal tone from ``source_azimuth_deg``.

    ``method="closed_form"`` evaluates the narrowband array response;
    ``method="simulated"`` synthesizes a noise-free tone and beamforms it.
    """
    if not f > 0:
        raise InvalidFrequencyError(f"frequency must be positive, got {f}")
    grid = grid or SteeringGrid.uniform()
    if method == "closed_form":
        power = closed_form_power(geometry, source_azimuth_deg, f, grid.angles_deg)
        return BeamPattern.from_power(grid, power, f, source_azimuth_deg)
    if method == "simulated":
        src = SourceSpec(float(np.mod(source_azimuth_deg, 360.0)), Tone(f), amplitude=0.5, duration_s=duration_s)
        rec = synthesize(src, geometry, sample_rate, interpolation=kwargs.get("interpolation", "cubic"))
        return beam_pattern(rec, geometry, grid, frequency_hz=f, source_azimuth_deg=source_azimuth_deg, **kwargs)
    raise ValueError(f"unknown method {method!r}")
