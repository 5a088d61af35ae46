"""Fractional-delay kernels shared by synthesis and beamforming.

A delay of ``D = k + f`` samples (``k`` integer, ``0 <= f < 1``) produces
``y[n] = x(n - D)``, reconstructed from the neighbouring samples of ``x``.
Samples outside the input are treated as zero.

Two kernels are available: 2-tap linear interpolation and 4-tap (cubic)
Lagrange interpolation. The cubic kernel is the default because the linear
kernel's amplitude ripple across fractional positions biases the beam-pattern
peak by several degrees near endfire at low frequencies, where the pattern is
very flat.
"""

from __future__ import annotations

import numpy as np

KINDS = ("linear", "cubic")


def taps(frac, kind="cubic"):
    """Tap offsets and weights for fractional part(s) ``frac``.

    Returns ``(offsets, weights)`` where ``offsets`` is a tuple of ints relative
    to ``u = n - k`` and ``weights`` has shape ``(len(offsets),) + frac.shape``.
    """
    f = np.asarray(frac, dtype=float)
    if kind == "linear":
        return (0, -1), np.stack([1.0 - f, f])
    if kind == "cubic":
        # Lagrange nodes at u-2, u-1, u, u+1; evaluate at u - f.
        t = 1.0 - f
        w_m2 = -t * (t - 1.0) * (t - 2.0) / 6.0
        w_m1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
        w_0 = -(t + 1.0) * t * (t - 2.0) / 2.0
        w_p1 = (t + 1.0) * t * (t - 1.0) / 6.0
        return (1, 0, -1, -2), np.stack([w_p1, w_0, w_m1, w_m2])
    raise ValueError(f"unknown interpolation kind {kind!r}; expected one of {KINDS}")


def _split(delay):
    k = np.floor(delay)
    return k.astype(np.int64), delay - k


def fractional_delay(x, delay, kind="cubic"):
    """Delay a 1-D signal by ``delay`` samples (may be negative or fractional)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    k, f = _split(np.asarray(float(delay)))
    k = int(k)
    offsets, w = taps(f, kind)
    pad = abs(k) + 3
    xp = np.concatenate([np.zeros(pad), x, np.zeros(pad)])
    y = np.zeros(n)
    base = pad - k
    for off, wj in zip(offsets, w):
        if wj != 0.0:
            y += wj * xp[base + off: base + off + n]
    return y


def shifted_windows(x, delays, start, length, kind="cubic"):
    """Delayed copies of ``x`` restricted to ``[start, start + length)``.

    ``delays`` is a 1-D array of delays in samples; the result has shape
    ``(len(delays), length)`` and row ``a`` equals
    ``fractional_delay(x, delays[a])[start:start + length]``.
    """
    x = np.asarray(x, dtype=float)
    delays = np.asarray(delays, dtype=float)
    k, f = _split(delays)
    offsets, w = taps(f, kind)
    pad = int(np.abs(k).max()) + 3
    xp = np.concatenate([np.zeros(pad), x, np.zeros(pad)])
    rows = np.lib.stride_tricks.sliding_window_view(xp, length)
    base = start + pad - k
    out = np.zeros((delays.shape[0], length))
    for off, wj in zip(offsets, w):
        out += wj[:, None] * rows[base + off]
    return out


def shift_basis(x, delays, start, length, kind="cubic"):
    """Factor :func:`shifted_windows` as ``coeffs @ rows``.

    Returns ``(rows, coeffs)`` where ``rows`` holds each distinct integer
    shift of ``x`` over the window once, shape ``(m, length)``, and ``coeffs``
    has shape ``(len(delays), m)``. Cheaper than :func:`shifted_windows` when
    many delays share integer parts.
    """
    x = np.asarray(x, dtype=float)
    delays = np.asarray(delays, dtype=float)
    k, f = _split(delays)
    offsets, w = taps(f, kind)
    pad = int(np.abs(k).max()) + 3
    xp = np.concatenate([np.zeros(pad), x, np.zeros(pad)])
    idx = (start + pad - k)[None, :] + np.asarray(offsets)[:, None]
    uniq, inv = np.unique(idx, return_inverse=True)
    inv = inv.reshape(idx.shape)
    coeffs = np.zeros((delays.shape[0], uniq.size))
    cols = np.arange(delays.shape[0])
    for j in range(len(offsets)):
        np.add.at(coeffs, (cols, inv[j]), w[j])
    rows = np.lib.stride_tricks.sliding_window_view(xp, length)[uniq]
    return rows, coeffs
