import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.signal import correlate

from ulabeam.errors import AliasedSynthesisError, InvalidFrequencyError, OutOfRangeError, WindowTooLongError
from ulabeam.geometry import uniform_linear
from ulabeam.synthesis import (
    DegradationSpec,
    LinearSweep,
    MultichannelRecording,
    Reflection,
    SourceSpec,
    Tone,
    arrival_delays,
    extract_band_segment,
    instantaneous_frequency,
    synthesize,
)

FS = 96000
SWEEP = LinearSweep(500, 3000)


def test_broadside_channels_identical(pair):
    rec = synthesize(SourceSpec(0.0, Tone(1650), duration_s=0.05), pair, FS)
    assert np.array_equal(rec.channels[0], rec.channels[1])


def test_endfire_delay(pair):
    tau = arrival_delays(pair, 90.0)
    assert tau[1] == pytest.approx(0.084 / 343)
    assert tau[1] * 1e6 == pytest.approx(244.9, abs=0.05)


def _xcorr_lag(a, b):
    """Delay of b relative to a, in samples, by cross-correlation with a parabolic peak fit."""
    cc = correlate(b, a, mode="full", method="fft")
    k = int(np.argmax(cc))
    y0, y1, y2 = cc[k - 1], cc[k], cc[k + 1]
    return k - (len(a) - 1) + 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2)


def test_endfire_tone_tdoa_by_xcorr(pair):
    rec = synthesize(SourceSpec(90.0, Tone(1000), duration_s=0.05), pair, FS)
    # a tone's xcorr has peaks every period; the period (96 samples) is far from the 23.5-sample lag
    lag = _xcorr_lag(rec.channels[0][200:-200], rec.channels[1][200:-200])
    assert lag == pytest.approx(0.084 / 343 * FS, abs=0.5)


def test_tdoa_matches_geometry_on_1deg_grid(pair):
    expected_all, measured_all = [], []
    for az in range(0, 360):
        rec = synthesize(SourceSpec(float(az), SWEEP, duration_s=0.05), pair, FS)
        measured_all.append(_xcorr_lag(rec.channels[0], rec.channels[1]))
        expected_all.append(arrival_delays(pair, az)[1] * FS)
    assert np.abs(np.array(measured_all) - np.array(expected_all)).max() < 0.5


@settings(max_examples=25, deadline=None)
@given(az=st.floats(0, 180, exclude_max=True), n=st.integers(2, 5))
def test_mirror_azimuths_identical(az, n):
    g = uniform_linear(n, 0.084)
    a = synthesize(SourceSpec(az, Tone(1300), duration_s=0.01), g, FS)
    b = synthesize(SourceSpec((180.0 - az) % 360.0, Tone(1300), duration_s=0.01), g, FS)
    # 180 - az is inexact for arbitrary floats; allow rounding-level differences
    assert np.allclose(a.channels, b.channels, rtol=0, atol=1e-12)


def test_mirror_azimuths_bit_identical_on_degree_grid(pair):
    for az in range(0, 360, 7):
        a = synthesize(SourceSpec(float(az), Tone(1300), duration_s=0.005), pair, FS)
        b = synthesize(SourceSpec(float((180 - az) % 360), Tone(1300), duration_s=0.005), pair, FS)
        assert np.array_equal(a.channels, b.channels), az


def test_zero_noise_is_noop(pair):
    src = SourceSpec(30.0, Tone(800), duration_s=0.02)
    a = synthesize(src, pair, FS)
    b = synthesize(src, pair, FS, DegradationSpec(noise_rms=0.0), seed=123)
    assert np.array_equal(a.channels, b.channels)


def test_noise_is_seeded(pair):
    src = SourceSpec(30.0, Tone(800), duration_s=0.02)
    deg = DegradationSpec(noise_rms=0.05)
    a = synthesize(src, pair, FS, deg, seed=4)
    b = synthesize(src, pair, FS, deg, seed=4)
    c = synthesize(src, pair, FS, deg, seed=5)
    assert np.array_equal(a.channels, b.channels)
    assert not np.array_equal(a.channels, c.channels)
    resid = a.channels - synthesize(src, pair, FS).channels
    assert resid.std() == pytest.approx(0.05, rel=0.05)


def test_reflection_adds_delayed_copy(pair):
    src = SourceSpec(0.0, Tone(1000), amplitude=0.4, duration_s=0.02)
    deg = DegradationSpec(reflections=(Reflection(0.0, 0.5, 48 / FS),))
    direct = synthesize(src, pair, FS).channels
    both = synthesize(src, pair, FS, deg).channels
    # broadside reflection delayed by 48 samples = half a 1 kHz period: antiphase
    assert np.allclose(both[:, 100:], 0.5 * direct[:, 100:], atol=1e-9)


def test_nyquist_violation(pair):
    with pytest.raises(AliasedSynthesisError):
        synthesize(SourceSpec(0.0, Tone(3000), duration_s=0.01), pair, 5000)


def test_source_validation():
    with pytest.raises(OutOfRangeError):
        SourceSpec(360.0, Tone(1000))
    with pytest.raises(OutOfRangeError):
        SourceSpec(0.0, Tone(1000), amplitude=1.5)
    with pytest.raises(InvalidFrequencyError):
        Tone(0)
    with pytest.raises(InvalidFrequencyError):
        LinearSweep(3000, 500)
    with pytest.raises(OutOfRangeError):
        Reflection(10.0, 1.2, 0.0)
    with pytest.raises(OutOfRangeError):
        Reflection(10.0, 0.5, -1e-3)
    with pytest.raises(OutOfRangeError):
        DegradationSpec(noise_rms=-0.1)


@pytest.mark.parametrize("t, f", [(0.0, 500.0), (10.0, 3000.0), (4.6, 1650.0), (5.0, 1750.0)])
def test_instantaneous_frequency(t, f):
    assert instantaneous_frequency(SWEEP, t, 10.0) == pytest.approx(f)


def test_instantaneous_frequency_range():
    with pytest.raises(OutOfRangeError):
        instantaneous_frequency(SWEEP, 10.5, 10.0)
    with pytest.raises(OutOfRangeError):
        instantaneous_frequency(SWEEP, -0.1, 10.0)


def test_sweep_frequency_by_zero_crossings(pair):
    rec = synthesize(SourceSpec(0.0, SWEEP, duration_s=10.0), pair, FS)
    x = rec.channels[0]
    half = int(0.02 * FS)
    seg = x[5 * FS - half: 5 * FS + half]
    crossings = np.count_nonzero(np.diff(np.signbit(seg)))
    assert crossings / (2 * 0.04) == pytest.approx(1750, rel=0.01)


def test_extract_band_segment_centering():
    rec = MultichannelRecording(FS, np.tile(np.arange(10 * FS, dtype=float), (2, 1)))
    seg = extract_band_segment(rec, SWEEP, 1650, 4096)
    assert seg.channels.shape == (2, 4096)
    assert seg.channels[0, 2048] == 441600
    first = extract_band_segment(rec, SWEEP, 500, 4096)
    assert first.channels[0, 0] == 0
    last = extract_band_segment(rec, SWEEP, 3000, 4096)
    assert last.channels[0, -1] == 10 * FS - 1


def test_extract_band_segment_errors():
    rec = MultichannelRecording(FS, np.zeros((2, 1000)))
    with pytest.raises(OutOfRangeError):
        extract_band_segment(rec, SWEEP, 3500, 100)
    with pytest.raises(WindowTooLongError):
        extract_band_segment(rec, SWEEP, 1000, 2000)


def test_recording_shape_checks():
    rec = MultichannelRecording(FS, np.zeros(10))
    assert rec.channels.shape == (1, 10)
    with pytest.raises(ValueError):
        MultichannelRecording(0, np.zeros((1, 10)))
    with pytest.raises(ValueError):
        rec.channels[0, 0] = 1.0
