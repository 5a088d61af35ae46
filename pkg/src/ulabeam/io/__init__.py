from .export import (
    beam_pattern_from_csv,
    beam_pattern_from_dict,
    beam_pattern_to_csv,
    beam_pattern_to_dict,
    heatmap_from_csv,
    heatmap_from_dict,
    heatmap_to_csv,
    heatmap_to_dict,
    load_beam_pattern,
    summary_to_dict,
    summary_to_text,
)
from .svg import colormap, emit_beam_pattern_svg, emit_heatmap_svg
from .wav import ClippingWarning, WavSpec, encode_pcm, read_wav, read_wav_file, write_wav, write_wav_file
