"""Time-domain delay-and-sum beamforming for uniform linear microphone arrays."""

from .beamformer import (
    BeamPattern,
    SteeringGrid,
    beam_pattern,
    closed_form_power,
    compensation_delays,
    delay_and_sum,
    steered_power,
    steering_delays,
    theoretical_beam_pattern,
)
from .geometry import ArrayGeometry, is_aliased, max_unaliased_frequency, min_spacing_for, uniform_linear
from .metrics import (
    BandSummary,
    ComparisonResult,
    HeatmapGrid,
    area_difference,
    array_gain,
    build_heatmap,
    compare,
    peak_angle,
    peak_delta,
    rmse,
    summarize,
)
from .synthesis import (
    DegradationSpec,
    LinearSweep,
    MultichannelRecording,
    Reflection,
    SourceSpec,
    Tone,
    extract_band_segment,
    instantaneous_frequency,
    synthesize,
)

__version__ = "0.1.0"
