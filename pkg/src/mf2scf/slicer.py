"""Deterministic slice masks: 5 shape families x 4 scales = 20 slices per image.

Shape families, in fixed order: square, triangle, circle, ldc (left diagonal
cropping), rdc (right diagonal cropping). Scale fractions grow with the scale
index, so the kept area never shrinks within a family. Mask ids are
``(shape, scale_index)`` pairs and the slice ordering is shape-major,
scale-minor, identical on every run.
"""

import math

import numpy as np

from .errors import DimensionMismatch, ImageTooSmall
from .imgproc import round_half_up

SHAPES = ("square", "triangle", "circle", "ldc", "rdc")
SCALE_FRACTIONS = (0.50, 0.65, 0.80, 0.95)
MIN_SLICE_DIM = 8
SLICE_COUNT = len(SHAPES) * len(SCALE_FRACTIONS)


def _square_bounds(width, height, fraction):
    side = max(1, int(round_half_up(fraction * min(width, height))))
    x0 = (width - side) // 2
    y0 = (height - side) // 2
    return x0, y0, side


def _square_mask(width, height, fraction):
    x0, y0, side = _square_bounds(width, height, fraction)
    mask = np.zeros((height, width), dtype=bool)
    mask[y0 : y0 + side, x0 : x0 + side] = True
    return mask


def _triangle_mask(width, height, fraction):
    # isosceles, apex up, inscribed in the same-scale square: apex at the
    # square's top-center, base along its bottom edge
    x0, y0, side = _square_bounds(width, height, fraction)
    x1 = x0 + side - 1
    y1 = y0 + side - 1
    cx = (x0 + x1) / 2.0
    ys, xs = np.mgrid[0:height, 0:width]
    drop = max(y1 - y0, 1)
    t = (ys - y0) / drop
    return (ys >= y0) & (ys <= y1) & (np.abs(xs - cx) <= t * (side - 1) / 2.0)


def _circle_mask(width, height, fraction):
    radius = 0.5 * fraction * min(width, height)
    cx = (width - 1) / 2.0
    cy = (height - 1) / 2.0
    ys, xs = np.mgrid[0:height, 0:width]
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= radius * radius


def _ldc_mask(width, height, fraction):
    # keep pixels on/below the image's main diagonal; the cut line is raised by
    # c so the kept region covers the requested fraction of the continuous area
    c = height * (1.0 - math.sqrt(2.0 * (1.0 - fraction)))
    ys, xs = np.mgrid[0:height, 0:width]
    return (ys + 0.5) >= (height / width) * (xs + 0.5) - c


def _rdc_mask(width, height, fraction):
    return np.ascontiguousarray(_ldc_mask(width, height, fraction)[:, ::-1])


_BUILDERS = {
    "square": _square_mask,
    "triangle": _triangle_mask,
    "circle": _circle_mask,
    "ldc": _ldc_mask,
    "rdc": _rdc_mask,
}


def generate_masks(width, height):
    """Return the 20 ((shape, scale_index), mask) pairs in fixed order.

    Masks are (H, W) bool arrays with at least one kept pixel each.
    """
    if width < MIN_SLICE_DIM or height < MIN_SLICE_DIM:
        raise ImageTooSmall(
            f"slicing needs at least {MIN_SLICE_DIM}x{MIN_SLICE_DIM}, got {width}x{height}"
        )
    out = []
    for shape in SHAPES:
        build = _BUILDERS[shape]
        for k, fraction in enumerate(SCALE_FRACTIONS):
            mask = build(width, height, fraction)
            out.append(((shape, k), mask))
    return out


def apply_mask(img, mask):
    """Crop to the mask's bounding box; pixels outside the mask become black."""
    img = np.asarray(img)
    if img.shape[:2] != mask.shape:
        raise DimensionMismatch(
            f"mask shape {mask.shape} does not match image shape {img.shape[:2]}"
        )
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        raise ValueError("mask keeps no pixels")
    y0, y1 = ys.min(), ys.max() + 1
    x0, x1 = xs.min(), xs.max() + 1
    out = img[y0:y1, x0:x1].copy()
    out[~mask[y0:y1, x0:x1]] = 0
    return out


def slice_filename(stem, shape, scale_index):
    return f"{stem}__{shape}_{scale_index}.png"
