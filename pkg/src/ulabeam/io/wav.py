"""RIFF/WAVE integer PCM codec (16, 24 and 32 bit, any channel count).

Samples decode to floats by dividing by ``2**(bits - 1)``, so the codec is
bit-exact: decoding and re-encoding reproduces the original data chunk.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ShapeError, TruncationError, UnsupportedFormatError, ValidationError, WavParseError
from ..synthesis import MultichannelRecording

PCM = 0x0001
IEEE_FLOAT = 0x0003
EXTENSIBLE = 0xFFFE
BIT_DEPTHS = (16, 24, 32)


class ClippingWarning(UserWarning):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"{count} samples outside [-1, 1] were saturated")


@dataclass(frozen=True)
class WavSpec:
    sample_rate: int
    bit_depth: int = 16
    channel_count: int = 1

    def __post_init__(self):
        if self.bit_depth not in BIT_DEPTHS:
            raise UnsupportedFormatError(f"bit depth {self.bit_depth} not in {BIT_DEPTHS}")
        if self.channel_count < 1:
            raise ValidationError("channel count must be >= 1")
        if not self.sample_rate > 0:
            raise ValidationError("sample rate must be positive")

    @property
    def block_align(self) -> int:
        return self.channel_count * self.bit_depth // 8


def _decode(raw: bytes, bits: int, channels: int) -> np.ndarray:
    width = bits // 8
    if bits == 16:
        ints = np.frombuffer(raw, dtype="<i2").astype(np.int64)
    elif bits == 32:
        ints = np.frombuffer(raw, dtype="<i4").astype(np.int64)
    else:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, width).astype(np.int64)
        ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
    scale = float(1 << (bits - 1))
    return (ints / scale).reshape(-1, channels).T


def encode_pcm(samples: np.ndarray, bit_depth: int) -> tuple[bytes, int]:
    """Interleave ``(channels, frames)`` floats into PCM bytes.

    Returns the bytes and the number of samples that lay outside [-1, 1].
    """
    x = np.asarray(samples, dtype=float)
    clipped = int(np.count_nonzero(np.abs(x) > 1.0))
    full = 1 << (bit_depth - 1)
    q = np.clip(np.rint(x.T.ravel() * full), -full, full - 1).astype(np.int64)
    if bit_depth == 16:
        return q.astype("<i2").tobytes(), clipped
    if bit_depth == 32:
        return q.astype("<i4").tobytes(), clipped
    u = (q & 0xFFFFFF).astype(np.uint32)
    b = np.stack([u & 0xFF, (u >> 8) & 0xFF, (u >> 16) & 0xFF], axis=1).astype(np.uint8)
    return b.tobytes(), clipped


def read_wav(data: bytes, filename: str | None = None) -> tuple[WavSpec, MultichannelRecording]:
    """Parse a RIFF/WAVE integer PCM file. Unknown chunks are skipped."""
    data = bytes(data)

    def fail(msg, offset):
        raise WavParseError(msg, offset, filename)

    if len(data) < 12:
        fail("file shorter than a RIFF header", 0)
    if data[0:4] != b"RIFF":
        fail(f"expected 'RIFF', found {data[0:4]!r}", 0)
    if data[8:12] != b"WAVE":
        fail(f"expected 'WAVE', found {data[8:12]!r}", 8)

    fmt = None
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = pos + 8
        if cid == b"fmt ":
            if size < 16 or body + size > len(data):
                fail("fmt chunk too short", pos)
            tag, ch, rate, _, align, bits = struct.unpack_from("<HHIIHH", data, body)
            if tag == EXTENSIBLE:
                if size < 40:
                    fail("extensible fmt chunk too short", pos)
                tag = struct.unpack_from("<H", data, body + 24)[0]
            if tag == IEEE_FLOAT:
                raise UnsupportedFormatError(f"floating-point WAV is not supported ({filename or 'input'})")
            if tag != PCM:
                raise UnsupportedFormatError(f"format tag 0x{tag:04x} is not integer PCM ({filename or 'input'})")
            if bits not in BIT_DEPTHS:
                raise UnsupportedFormatError(f"{bits}-bit PCM is not supported ({filename or 'input'})")
            if ch < 1:
                fail("channel count is zero", body + 2)
            if align != ch * bits // 8:
                fail(f"block align {align} inconsistent with {ch} x {bits}-bit", body + 12)
            fmt = WavSpec(rate, bits, ch)
        elif cid == b"data":
            if fmt is None:
                fail("data chunk before fmt chunk", pos)
            if body + size > len(data):
                raise TruncationError(
                    f"data chunk declares {size} bytes but only {len(data) - body} remain"
                    f" ({filename or 'input'})"
                )
            if size % fmt.block_align:
                raise TruncationError(
                    f"data chunk of {size} bytes is not a whole number of {fmt.block_align}-byte frames"
                    f" ({filename or 'input'})"
                )
            channels = _decode(data[body:body + size], fmt.bit_depth, fmt.channel_count)
            return fmt, MultichannelRecording(fmt.sample_rate, channels)
        pos = body + size + (size & 1)
    if fmt is None:
        fail("no fmt chunk", pos)
    fail("no data chunk", pos)


def write_wav(spec: WavSpec, rec: MultichannelRecording) -> bytes:
    """Canonical 44-byte-header PCM file.

    Samples beyond +-1 saturate; a :class:`ClippingWarning` carrying the
    count is issued when that happens.
    """
    if spec.channel_count != rec.n_channels:
        raise ShapeError(f"spec has {spec.channel_count} channels, recording has {rec.n_channels}")
    if int(spec.sample_rate) != rec.sample_rate:
        raise ShapeError(f"spec rate {spec.sample_rate} Hz != recording rate {rec.sample_rate} Hz")
    payload, clipped = encode_pcm(rec.channels, spec.bit_depth)
    if clipped:
        warnings.warn(ClippingWarning(clipped), stacklevel=2)
    pad = b"\x00" if len(payload) & 1 else b""
    byte_rate = int(spec.sample_rate) * spec.block_align
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload) + len(pad), b"WAVE",
        b"fmt ", 16, PCM, spec.channel_count, int(spec.sample_rate), byte_rate,
        spec.block_align, spec.bit_depth,
        b"data", len(payload),
    )
    return header + payload + pad


def read_wav_file(path) -> tuple[WavSpec, MultichannelRecording]:
    path = Path(path)
    return read_wav(path.read_bytes(), filename=str(path))


def write_wav_file(path, rec: MultichannelRecording, bit_depth: int = 16) -> WavSpec:
    spec = WavSpec(int(rec.sample_rate), bit_depth, rec.n_channels)
    Path(path).write_bytes(write_wav(spec, rec))
    return spec
