"""CSV and JSON serialization of beam patterns, heatmaps and summaries."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from ..beamformer import BeamPattern, SteeringGrid
from ..errors import ValidationError
from ..metrics import BandSummary, ComparisonResult, HeatmapGrid, build_heatmap


HEATMAP_FIELDS = ("array_angle_deg", "frequency_hz", "area_difference", "rmse_percent", "peak_delta_deg")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def beam_pattern_to_csv(p: BeamPattern) -> str:
    return _csv(((_num(a), _num(v)) for a, v in zip(p.angles_deg, p.values)), ("angle_deg", "value"))


def beam_pattern_from_csv(text: str, frequency_hz=None, source_azimuth_deg=None) -> BeamPattern:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or set(rows[0]) != {"angle_deg", "value"}:
        raise ValidationError("beam pattern CSV needs columns angle_deg,value")
    angles = [float(r["angle_deg"]) for r in rows]
    values = [float(r["value"]) for r in rows]
    return BeamPattern(SteeringGrid(angles), values, frequency_hz, source_azimuth_deg)


def beam_pattern_to_dict(p: BeamPattern) -> dict:
    return {
        "frequency_hz": p.frequency_hz,
        "source_azimuth_deg": p.source_azimuth_deg,
        "angles_deg": [float(a) for a in p.angles_deg],
        "values": [float(v) for v in p.values],
    }


def beam_pattern_from_dict(d: dict) -> BeamPattern:
    return BeamPattern(SteeringGrid(d["angles_deg"]), d["values"], d.get("frequency_hz"), d.get("source_azimuth_deg"))


def load_beam_pattern(text: str, **kwargs) -> BeamPattern:
    """Parse either the JSON or the CSV form."""
    if text.lstrip().startswith("{"):
        return beam_pattern_from_dict(json.loads(text))
    return beam_pattern_from_csv(text, **kwargs)


def heatmap_to_csv(grid: HeatmapGrid) -> str:
    rows = []
    for a, f, c in grid.iter_cells():
        if c is None:
            rows.append((_num(a), _num(f), "", "", ""))
        else:
            rows.append((_num(a), _num(f), _num(c.area_difference), _num(c.rmse_percent), _num(c.peak_delta_deg)))
    return _csv(rows, HEATMAP_FIELDS)


def heatmap_from_csv(text: str) -> HeatmapGrid:
    cells = []
    for r in csv.DictReader(io.StringIO(text)):
        key = (float(r["array_angle_deg"]), float(r["frequency_hz"]))
        if r["area_difference"] == "":
            cells.append((key, None))
        else:
            cells.append((key, ComparisonResult(
                float(r["peak_delta_deg"]), float(r["area_difference"]), float(r["rmse_percent"]))))
    return build_heatmap(cells)


def heatmap_to_dict(grid: HeatmapGrid) -> dict:
    return {
        "array_angles_deg": list(grid.array_angles_deg),
        "frequencies_hz": list(grid.frequencies_hz),
        "cells": [[None if c is None else c.to_dict() for c in row] for row in grid.cells],
    }


def heatmap_from_dict(d: dict) -> HeatmapGrid:
    cells = tuple(
        tuple(None if c is None else ComparisonResult(**c) for c in row) for row in d["cells"]
    )
    return HeatmapGrid(tuple(d["array_angles_deg"]), tuple(d["frequencies_hz"]), cells)


def _fmt_pct(x: float) -> str:
    return "n/a" if math.isnan(x) else f"{x:.2f}%"


def summary_to_dict(s: BandSummary) -> dict:
    r2 = lambda x: None if math.isnan(x) else round(float(x), 2)
    return {
        "metric": s.metric,
        "band_hz": list(s.band_hz),
        "trials": [{"trial": i + 1, "average": r2(v)} for i, v in enumerate(s.trial_averages)],
        "overall": r2(s.overall),
    }


def summary_to_text(s: BandSummary, label: str = "Average RMSE value") -> str:
    """Two-row table: a header of trial names and one row of averages."""
    heads = [f"Trial {i + 1}" for i in range(len(s.trial_averages))] + ["Overall"]
    vals = [_fmt_pct(v) for v in s.trial_averages] + [_fmt_pct(s.overall)]
    widths = [max(len(h), len(v)) for h, v in zip(heads, vals)]
    lw = len(label)
    lines = [
        " " * lw + "".join(f"  {h:>{w}}" for h, w in zip(heads, widths)),
        label + "".join(f"  {v:>{w}}" for v, w in zip(vals, widths)),
        f"({s.metric} averaged over {s.band_hz[0]:g}-{s.band_hz[1]:g} Hz, endpoints included)",
    ]
    return "\n".join(lines) + "\n"
