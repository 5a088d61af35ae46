import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ulabeam.beamformer import BeamPattern, SteeringGrid, beam_pattern, theoretical_beam_pattern
from ulabeam.errors import IncompleteGridError, ShapeError, UndefinedSNRError
from ulabeam.geometry import uniform_linear
from ulabeam.metrics import (
    ComparisonResult,
    area_difference,
    array_gain,
    build_heatmap,
    compare,
    peak_angle,
    peak_delta,
    rmse,
    summarize,
)
from ulabeam.synthesis import DegradationSpec, MultichannelRecording, SourceSpec, Tone, synthesize

FS = 96000
GRID = SteeringGrid.uniform()
PAIR = uniform_linear(2, 0.084)


def pattern(values, grid=None):
    values = np.asarray(values, dtype=float)
    grid = grid or SteeringGrid(np.arange(values.size) * (360.0 / values.size))
    return BeamPattern(grid, values)


def test_peak_angle_matched():
    p = theoretical_beam_pattern(PAIR, 50, 1650, GRID)
    assert peak_angle(p) in (50.0, 130.0)


def test_peak_angle_tie_goes_to_first():
    assert peak_angle(pattern(np.ones(360))) == 0.0
    v = np.zeros(360)
    v[[40, 200]] = 1
    assert peak_angle(pattern(v)) == 40.0


@pytest.mark.parametrize(
    "a, b, expected",
    [(50, 50, 0), (50, 130, 0), (50, 60, 10), (80, 280, 160), (0, 180, 0), (350, 10, 20), (90, 270, 180)],
)
def test_peak_delta_mirror_aware(a, b, expected):
    assert peak_delta(a, b) == pytest.approx(expected, abs=1e-9)


def test_area_difference_examples():
    p = theoretical_beam_pattern(PAIR, 50, 1650, GRID)
    assert area_difference(p, p) == 0
    spike = np.zeros(360)
    spike[17] = 1
    assert area_difference(np.ones(360), spike) == pytest.approx(359 / 360)


def test_area_difference_noise_regression():
    # frozen from an independent element-by-element mean-abs loop over the two patterns
    th = theoretical_beam_pattern(PAIR, 50, 1650, GRID, method="simulated")
    rec = synthesize(SourceSpec(50.0, Tone(1650), 0.5, 0.1), PAIR, FS, DegradationSpec(0.01), seed=0)
    noisy = beam_pattern(rec, PAIR, GRID)
    assert area_difference(th, noisy) == pytest.approx(1.7318646e-4, rel=1e-4)


def test_rmse_examples():
    p = theoretical_beam_pattern(PAIR, 50, 1650, GRID)
    assert rmse(p, p) == 0
    assert rmse(np.ones(360), np.zeros(360)) == pytest.approx(100.0)


def test_grid_mismatch():
    a = pattern(np.ones(360))
    b = pattern(np.ones(180))
    with pytest.raises(ShapeError):
        area_difference(a, b)
    with pytest.raises(ShapeError):
        rmse(a, b)
    c = BeamPattern(SteeringGrid(np.arange(360) + 0.5 - 0.5 * (np.arange(360) == 359)), np.ones(360))
    with pytest.raises(ShapeError):
        compare(a, c)


unit_vectors = arrays(np.float64, 72, elements=st.floats(0, 1))


@given(unit_vectors, unit_vectors, st.integers(0, 71))
def test_metric_properties(a, b, k):
    assert area_difference(a, b) == area_difference(b, a)
    assert rmse(a, b) == rmse(b, a)
    assert 0 <= area_difference(a, b) <= 1
    assert rmse(a, b) >= 100 * area_difference(a, b) - 1e-9
    ra, rb = np.roll(a, k), np.roll(b, k)
    assert area_difference(ra, rb) == pytest.approx(area_difference(a, b), abs=1e-12)
    assert rmse(ra, rb) == pytest.approx(rmse(a, b), abs=1e-9)
    # zero iff identical; quantize so squared differences cannot underflow
    qa, qb = np.round(a * 1024) / 1024, np.round(b * 1024) / 1024
    assert (area_difference(qa, qb) == 0) == np.array_equal(qa, qb)
    assert (rmse(qa, qb) == 0) == np.array_equal(qa, qb)


def test_compare_fields():
    th = theoretical_beam_pattern(PAIR, 50, 1650, GRID)
    ex = theoretical_beam_pattern(PAIR, 60, 1650, GRID)
    r = compare(th, ex)
    assert r.peak_delta_deg == pytest.approx(10)
    assert r.area_difference > 0 and r.rmse_percent >= 100 * r.area_difference


def _noisy_pair(geometry, noise, steer=0.0):
    clean = synthesize(SourceSpec(steer, Tone(1000), 0.5, 0.02), geometry, FS)
    return clean, MultichannelRecording(FS, clean.channels + noise)


def test_array_gain_correlated_noise_is_unity():
    g = uniform_linear(4, 0.084)
    n = np.random.default_rng(0).normal(0, 0.05, size=1920)
    clean, noisy = _noisy_pair(g, np.tile(n, (4, 1)))
    assert array_gain(clean, noisy, g, 0.0) == pytest.approx(1.0, rel=1e-9)


def test_array_gain_independent_noise_two_elements():
    gains = []
    for seed in range(40):
        n = np.random.default_rng(seed).normal(0, 0.05, size=(2, 1920))
        clean, noisy = _noisy_pair(PAIR, n)
        gains.append(array_gain(clean, noisy, PAIR, 0.0))
    assert np.mean(gains) == pytest.approx(2.0, rel=0.1)


def test_array_gain_undefined_without_noise():
    clean, _ = _noisy_pair(PAIR, 0.0)
    with pytest.raises(UndefinedSNRError):
        array_gain(clean, clean, PAIR, 0.0)


def test_array_gain_shape_mismatch():
    clean, _ = _noisy_pair(PAIR, 0.0)
    with pytest.raises(ShapeError):
        array_gain(clean, clean.slice(0, 1000), PAIR, 0.0)


R = ComparisonResult(1.0, 0.1, 12.0)


def test_build_heatmap_full_protocol_grid():
    angles = np.arange(0, 360, 20.0)
    freqs = np.arange(500, 3001, 100.0)
    cells = {(a, f): R for a in angles for f in freqs}
    h = build_heatmap(cells)
    assert h.shape == (18, 26)
    assert sum(1 for _ in h.iter_cells()) == 468


def test_build_heatmap_single_cell():
    h = build_heatmap([((50, 1650), R)])
    assert h.shape == (1, 1) and h.cells[0][0] is R


def test_build_heatmap_duplicate_and_missing():
    with pytest.raises(IncompleteGridError):
        build_heatmap([((0, 500), R), ((0, 500), R)])
    with pytest.raises(IncompleteGridError):
        build_heatmap([((0, 500), R), ((20, 600), R)])
    with pytest.raises(IncompleteGridError):
        build_heatmap([((0, 500), R)], angles=[0, 20], frequencies=[500])


def test_heatmap_merge_is_order_independent():
    items = [((a, f), ComparisonResult(0.0, a / 1000 + f / 1e6, 1.0)) for a in (0, 20, 40) for f in (500, 600)]
    h1 = build_heatmap(items)
    h2 = build_heatmap(list(reversed(items)))
    assert h1.cells == h2.cells


def test_summary_band_inclusive():
    cells = {(0.0, f): ComparisonResult(0, 0, f / 100) for f in (400.0, 500.0, 2000.0, 2100.0)}
    h = build_heatmap(cells)
    s = summarize([h, h], 500, 2000)
    assert s.trial_averages == (12.5, 12.5)
    assert s.overall == 12.5


def test_summary_skips_failed_cells():
    h = build_heatmap({(0.0, 500.0): ComparisonResult(0, 0, 10.0), (0.0, 600.0): None})
    assert summarize([h]).trial_averages == (10.0,)
