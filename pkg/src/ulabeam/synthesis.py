"""Far-field plane-wave recordings of a single source at a linear array.

Channel ``i`` receives the source waveform delayed by
``(x_i - x_0) * sin(azimuth) / c``; azimuth is measured from broadside,
counterclockwise positive. Reflections are extra attenuated plane waves and
white noise is added last.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .delay import fractional_delay
from .errors import (
    AliasedSynthesisError,
    InvalidFrequencyError,
    OutOfRangeError,
    ShapeError,
    ValidationError,
    WindowTooLongError,
)
from .geometry import ArrayGeometry

DEFAULT_SAMPLE_RATE = 96_000
DEFAULT_WINDOW = 4096


@dataclass(frozen=True)
class Tone:
    f: float

    def __post_init__(self):
        if not self.f > 0:
            raise InvalidFrequencyError(f"tone frequency must be positive, got {self.f}")

    @property
    def max_frequency(self) -> float:
        return self.f

    def render(self, t: np.ndarray, duration: float) -> np.ndarray:
        return np.sin(2 * np.pi * self.f * t)


@dataclass(frozen=True)
class LinearSweep:
    f0: float
    f1: float

    def __post_init__(self):
        if not (self.f1 > self.f0 > 0):
            raise InvalidFrequencyError(f"sweep needs f1 > f0 > 0, got {self.f0}..{self.f1}")

    @property
    def max_frequency(self) -> float:
        return self.f1

    def render(self, t: np.ndarray, duration: float) -> np.ndarray:
        rate = (self.f1 - self.f0) / duration
        return np.sin(2 * np.pi * (self.f0 * t + 0.5 * rate * t * t))


@dataclass(frozen=True)
class SourceSpec:
    azimuth_deg: float
    waveform: Tone | LinearSweep
    amplitude: float = 0.5
    duration_s: float = 10.0

    def __post_init__(self):
        if not 0.0 <= self.azimuth_deg < 360.0:
            raise OutOfRangeError(f"azimuth must lie in [0, 360), got {self.azimuth_deg}")
        if not 0.0 < self.amplitude <= 1.0:
            raise OutOfRangeError(f"amplitude must lie in (0, 1], got {self.amplitude}")
        if not self.duration_s > 0:
            raise ValidationError(f"duration must be positive, got {self.duration_s}")


@dataclass(frozen=True)
class Reflection:
    azimuth_deg: float
    gain: float
    extra_delay_s: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.gain <= 1.0:
            raise OutOfRangeError(f"reflection gain must lie in (0, 1], got {self.gain}")
        if self.extra_delay_s < 0:
            raise OutOfRangeError(f"reflection delay must be >= 0, got {self.extra_delay_s}")

    def to_dict(self) -> dict:
        return {"azimuth_deg": self.azimuth_deg, "gain": self.gain, "extra_delay_s": self.extra_delay_s}


@dataclass(frozen=True)
class DegradationSpec:
    noise_rms: float = 0.0
    reflections: tuple[Reflection, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.noise_rms < 0:
            raise OutOfRangeError(f"noise_rms must be >= 0, got {self.noise_rms}")
        object.__setattr__(self, "reflections", tuple(self.reflections))

    @property
    def is_clean(self) -> bool:
        return self.noise_rms == 0 and not self.reflections

    def to_dict(self) -> dict:
        return {"noise_rms": self.noise_rms, "reflections": [r.to_dict() for r in self.reflections]}

    @classmethod
    def from_dict(cls, d: dict) -> "DegradationSpec":
        refl = tuple(Reflection(**r) for r in d.get("reflections", ()))
        return cls(float(d.get("noise_rms", 0.0)), refl)


@dataclass(frozen=True, eq=False)
class MultichannelRecording:
    """``channels`` has shape (n_channels, n_samples)."""

    sample_rate: float
    channels: np.ndarray

    def __post_init__(self):
        ch = np.asarray(self.channels, dtype=float)
        if ch.ndim == 1:
            ch = ch[None, :]
        if ch.ndim != 2 or ch.shape[0] < 1:
            raise ShapeError(f"channels must be a 2-D (channels, samples) array, got shape {ch.shape}")
        if not self.sample_rate > 0:
            raise ValidationError(f"sample rate must be positive, got {self.sample_rate}")
        ch.setflags(write=False)
        object.__setattr__(self, "channels", ch)

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def n_samples(self) -> int:
        return self.channels.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate

    def slice(self, start: int, stop: int) -> "MultichannelRecording":
        return MultichannelRecording(self.sample_rate, self.channels[:, start:stop])


def sin_deg(angle_deg):
    """sin of an angle in degrees, folded to [-90, 90] first.

    Folding makes ``sin_deg(a) == sin_deg(180 - a)`` hold bit-for-bit, so
    mirror-image azimuths produce identical recordings.
    """
    a = np.mod(np.asarray(angle_deg, dtype=float), 360.0)
    a = np.where(a > 270.0, a - 360.0, np.where(a > 90.0, 180.0 - a, a))
    return np.sin(np.radians(a))


def arrival_delays(geometry: ArrayGeometry, azimuth_deg: float) -> np.ndarray:
    """Per-element arrival delay (s) of a plane wave, relative to element 0."""
    x = geometry.positions
    return (x - x[0]) * float(sin_deg(azimuth_deg)) / geometry.speed_of_sound


def synthesize(
    source: SourceSpec,
    geometry: ArrayGeometry,
    sample_rate: float = DEFAULT_SAMPLE_RATE,
    degrade: DegradationSpec | None = None,
    seed: int | np.random.SeedSequence | None = 0,
    interpolation: str = "cubic",
) -> MultichannelRecording:
    """Render ``source`` as received by every element of ``geometry``.

    Fractional delays are applied to the sampled waveform; samples with no
    history are zero-filled. Noise is drawn from ``numpy.random.default_rng(seed)``.
    """
    if geometry is None:
        raise ValidationError("geometry is required")
    degrade = degrade or DegradationSpec()
    f_top = source.waveform.max_frequency
    if sample_rate < 2 * f_top:
        raise AliasedSynthesisError(
            f"sample rate {sample_rate} Hz cannot represent {f_top} Hz (needs >= {2 * f_top})"
        )
    n = int(round(source.duration_s * sample_rate))
    t = np.arange(n) / sample_rate
    s = source.amplitude * source.waveform.render(t, source.duration_s)

    out = np.empty((geometry.n_elements, n))
    direct = arrival_delays(geometry, source.azimuth_deg) * sample_rate
    for i, d in enumerate(direct):
        out[i] = fractional_delay(s, d, interpolation)
    for refl in degrade.reflections:
        extra = refl.extra_delay_s * sample_rate
        for i, d in enumerate(arrival_delays(geometry, refl.azimuth_deg) * sample_rate):
            out[i] += refl.gain * fractional_delay(s, d + extra, interpolation)
    if degrade.noise_rms > 0:
        rng = np.random.default_rng(seed)
        out += rng.normal(0.0, degrade.noise_rms, size=out.shape)
    return MultichannelRecording(sample_rate, out)


def instantaneous_frequency(sweep: LinearSweep, t: float, duration: float) -> float:
    if not 0.0 <= t <= duration:
        raise OutOfRangeError(f"t={t} outside [0, {duration}]")
    return sweep.f0 + (sweep.f1 - sweep.f0) * t / duration


def sweep_time_at(sweep: LinearSweep, f: float, duration: float) -> float:
    """Inverse of :func:`instantaneous_frequency`."""
    if not sweep.f0 <= f <= sweep.f1:
        raise OutOfRangeError(f"{f} Hz outside sweep band [{sweep.f0}, {sweep.f1}]")
    return (f - sweep.f0) / (sweep.f1 - sweep.f0) * duration


def extract_band_segment(
    rec: MultichannelRecording,
    sweep: LinearSweep,
    target_f: float,
    window_len: int = DEFAULT_WINDOW,
    duration: float | None = None,
) -> MultichannelRecording:
    """Window of every channel centred where the sweep passes ``target_f``.

    ``duration`` defaults to the recording length. The window is clamped to
    the recording at the band edges.
    """
    duration = rec.duration_s if duration is None else duration
    t = sweep_time_at(sweep, target_f, duration)
    if window_len > rec.n_samples:
        raise WindowTooLongError(f"window of {window_len} samples exceeds recording of {rec.n_samples}")
    if window_len < 1:
        raise ValidationError("window length must be positive")
    center = int(round(t * rec.sample_rate))
    start = min(max(center - window_len // 2, 0), rec.n_samples - window_len)
    return rec.slice(start, start + window_len)
