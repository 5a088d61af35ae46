"""Spatial aliasing of the two-element array.

Prints the spacing bound, then the main-lobe and grating-lobe levels of a
simulated tone for frequencies across the sweep band.
"""
import argparse
import math

import numpy as np

from ulabeam.beamformer import SteeringGrid, beam_pattern
from ulabeam.geometry import max_unaliased_frequency, min_spacing_for, uniform_linear
from ulabeam.synthesis import SourceSpec, Tone, synthesize


def grating_angle(theta_s, f, d, c):
    """Grating-lobe angle from |sin(g) - sin(s)| = c / (f d), or None."""
    s = math.sin(math.radians(theta_s)) - c / (f * d)
    if s < -1:
        s = math.sin(math.radians(theta_s)) + c / (f * d)
    return None if abs(s) > 1 else math.degrees(math.asin(s)) % 360


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spacing", type=float, default=0.084)
    ap.add_argument("--speed-of-sound", type=float, default=343.0)
    ap.add_argument("--azimuth", type=float, default=60.0)
    args = ap.parse_args()

    geom = uniform_linear(2, args.spacing, args.speed_of_sound)
    print(f"spacing for 2000 Hz: {min_spacing_for(2000, args.speed_of_sound) * 100:.3f} cm")
    print(f"highest unaliased frequency at {args.spacing * 100:g} cm: {max_unaliased_frequency(geom):.1f} Hz")
    grid = SteeringGrid.uniform(1.0)
    print(f"\nsource at {args.azimuth:g} deg")
    print(f"{'f (Hz)':>8} {'peak':>6} {'grating':>8} {'level':>6}")
    for f in range(500, 3001, 250):
        rec = synthesize(SourceSpec(args.azimuth, Tone(f), duration_s=0.1), geom, 96_000)
        p = beam_pattern(rec, geom, grid)
        g = grating_angle(args.azimuth, f, args.spacing, args.speed_of_sound)
        lvl = "" if g is None else f"{p.values[int(round(g)) % 360]:.3f}"
        gs = "-" if g is None else f"{g:.1f}"
        print(f"{f:>8} {grid.angles_deg[int(np.argmax(p.values))]:>6g} {gs:>8} {lvl:>6}")


if __name__ == "__main__":
    main()
