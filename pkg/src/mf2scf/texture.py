"""Uniform LBP encoding and the concatenated five-plane global texture feature.

The 8-neighborhood is sampled at integer grid offsets of radius 1, enumerated
counter-clockwise (on-screen, y pointing down) starting from the right
neighbor, so bit p=0 corresponds to offset (+1, 0). A neighbor contributes a
1-bit when it is strictly brighter than the center; ties give 0.

Codes with at most two circular 0/1 transitions are uniform. The 58 uniform
8-bit codes map, in ascending numeric order, to labels 0..57; everything else
lands in the non-uniform bucket, label 58.
"""

import numpy as np

from .errors import DimensionMismatch, ImageTooSmall

P = 8
N_BINS = 59

# (dx, dy) ring offsets, counter-clockwise from the right neighbor (y is down)
NEIGHBOR_OFFSETS = (
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
)


def uniformity(code):
    """Number of circular 0/1 transitions in an 8-bit pattern."""
    bits = [(code >> p) & 1 for p in range(P)]
    return sum(bits[p] != bits[p - 1] for p in range(P))


def _build_u2_table():
    uniform_codes = [c for c in range(256) if uniformity(c) <= 2]
    assert len(uniform_codes) == N_BINS - 1
    table = np.full(256, N_BINS - 1, dtype=np.int64)
    for label, code in enumerate(uniform_codes):
        table[code] = label
    return table


U2_TABLE = _build_u2_table()


def ulbp_image(plane, p=P):
    """Label image of the interior pixels, shape (H-2, W-2), labels in [0, 58]."""
    if p != P:
        raise ValueError(f"only P={P} neighborhoods are supported, got {p}")
    plane = np.asarray(plane)
    h, w = plane.shape
    if h < 3 or w < 3:
        raise ImageTooSmall(f"ULBP needs at least 3x3, got {w}x{h}")
    center = plane[1:-1, 1:-1].astype(np.int64)
    code = np.zeros(center.shape, dtype=np.int64)
    for bit, (dx, dy) in enumerate(NEIGHBOR_OFFSETS):
        nb = plane[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx].astype(np.int64)
        code |= ((nb - center) > 0).astype(np.int64) << bit
    return U2_TABLE[code]


def ulbp_histogram(labels):
    """59-bin label counts, L1-normalized."""
    counts = np.bincount(np.asarray(labels).ravel(), minlength=N_BINS)
    counts = counts.astype(np.float64)
    return counts / counts.sum()


def global_feature(gsi, goi, cc, dc, ec):
    """Concatenate the ULBP histograms of the five planes; length 5 * 59 = 295."""
    planes = (gsi, goi, cc, dc, ec)
    shape = np.asarray(planes[0]).shape
    for plane in planes[1:]:
        if np.asarray(plane).shape != shape:
            raise DimensionMismatch(
                f"plane shapes differ: {shape} vs {np.asarray(plane).shape}"
            )
    return np.concatenate([ulbp_histogram(ulbp_image(plane)) for plane in planes])


GLOBAL_FEATURE_LEN = N_BINS * 5
