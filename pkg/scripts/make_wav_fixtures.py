"""Regenerate the WAV fixtures in tests/data with the stdlib ``wave`` writer.

The fixtures are independent of ulabeam's codec: sample values follow a
closed-form integer pattern that the tests rebuild on their own.
"""
import argparse
import wave
from pathlib import Path

import numpy as np


def pattern(frames: int, channels: int, bits: int) -> np.ndarray:
    """Deterministic (frames, channels) integers covering both rails."""
    full = 1 << (bits - 1)
    k = np.arange(frames)[:, None]
    c = np.arange(channels)[None, :]
    vals = ((k * 7919 + c * 104729) % (2 * full)) - full
    vals[0, :] = -full
    vals[1, :] = full - 1
    vals[2, :] = 0
    return vals.astype(np.int64)


def write(path: Path, frames: int, channels: int, bits: int, rate: int):
    ints = pattern(frames, channels, bits)
    width = bits // 8
    raw = b"".join(int(v).to_bytes(width, "little", signed=True) for v in ints.ravel())
    with wave.open(str(path), "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(width)
        w.setframerate(rate)
        w.writeframes(raw)


FIXTURES = {
    "stdlib_16bit_2ch.wav": (257, 2, 16, 96000),
    "stdlib_24bit_3ch.wav": (101, 3, 24, 48000),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Path(__file__).resolve().parents[1] / "tests" / "data", type=Path)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, (frames, ch, bits, rate) in FIXTURES.items():
        write(args.out / name, frames, ch, bits, rate)
        print(args.out / name)


if __name__ == "__main__":
    main()
