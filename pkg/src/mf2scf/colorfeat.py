"""HSV color feature: three 256-bin channel histograms, min-max normalized.

Binning: hue maps its [0, 360) range onto 256 bins (floor(H/360*256), clamped
to 255); S and V round onto 0..255 via floor(x*255 + 0.5). Each channel's
count vector is normalized independently by (x - min) / (max - min); a
constant vector maps to all zeros. The concatenation order is H, S, V.
"""

import numpy as np

N_BINS = 256
COLOR_FEATURE_LEN = N_BINS * 3


def hsv_histograms(hsv):
    """Per-channel 256-bin integer counts (H, S, V order)."""
    hsv = np.asarray(hsv, dtype=np.float64)
    h = hsv[..., 0].ravel()
    s = hsv[..., 1].ravel()
    v = hsv[..., 2].ravel()
    hb = np.minimum(np.floor(h / 360.0 * N_BINS), N_BINS - 1).astype(np.int64)
    sb = np.floor(s * 255.0 + 0.5).astype(np.int64)
    vb = np.floor(v * 255.0 + 0.5).astype(np.int64)
    return tuple(np.bincount(b, minlength=N_BINS) for b in (hb, sb, vb))


def color_feature(hists):
    """Min-max normalize each channel histogram and concatenate; length 768."""
    parts = []
    for counts in hists:
        counts = np.asarray(counts, dtype=np.float64)
        if counts.shape != (N_BINS,):
            raise ValueError(f"expected a {N_BINS}-bin histogram, got {counts.shape}")
        lo = counts.min()
        hi = counts.max()
        if hi <= lo:
            parts.append(np.zeros(N_BINS, dtype=np.float64))
        else:
            parts.append((counts - lo) / (hi - lo))
    return np.concatenate(parts)
