"""Raster plane conversions: gray-scale, Sobel gradient magnitude, and HSV.

Array conventions used everywhere in this package:

* RGB images are ``(H, W, 3)`` uint8 arrays (row-major, x = column index).
* Gray and gradient planes are ``(H, W)`` uint8 arrays on the 0-255 scale.
* HSV planes are ``(H, W, 3)`` float64 arrays with H in degrees ``[0, 360)``
  and S, V in ``[0, 1]``.

Non-square images are supported throughout; the only size requirement is a
full 3x3 neighborhood (width and height >= 3).
"""

import numpy as np
from PIL import Image

from .errors import ImageTooSmall

# ITU-R BT.601 luma weights; they sum to 1 so gray input maps to itself.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

MIN_DIM = 3


def round_half_up(x):
    """Round to nearest with .5 going up (np.rint would round ties to even)."""
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


def validate_rgb(img):
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ValueError(
            f"expected an (H, W, 3) uint8 array, got shape {img.shape} dtype {img.dtype}"
        )
    if img.shape[0] < MIN_DIM or img.shape[1] < MIN_DIM:
        raise ImageTooSmall(
            f"image must be at least {MIN_DIM}x{MIN_DIM}, got {img.shape[1]}x{img.shape[0]}"
        )
    return img


def load_image(path):
    """Read a PNG or JPEG file as an (H, W, 3) uint8 RGB array; alpha is dropped."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return validate_rgb(arr)


def save_image(arr, path):
    """Write an RGB or gray uint8 array as PNG."""
    Image.fromarray(arr).save(path, format="PNG")


def to_grayscale(img):
    """BT.601 luma: round(0.299 R + 0.587 G + 0.114 B), clamped to [0, 255]."""
    img = validate_rgb(img)
    wr, wg, wb = LUMA_WEIGHTS
    y = (
        wr * img[..., 0].astype(np.float64)
        + wg * img[..., 1].astype(np.float64)
        + wb * img[..., 2].astype(np.float64)
    )
    return np.clip(round_half_up(y), 0, 255).astype(np.uint8)


def sobel_gradient(gsi):
    """Per-pixel Sobel magnitude, replicate-padded borders, clamped to [0, 255].

    Magnitude is round(sqrt(gx^2 + gy^2)) with the standard 3x3 kernels, so the
    output stays commensurate with the 0-255 intensity scale that the graph
    edge rule compares it against.
    """
    gsi = np.asarray(gsi)
    if gsi.ndim != 2:
        raise ValueError(f"expected an (H, W) plane, got shape {gsi.shape}")
    if gsi.shape[0] < MIN_DIM or gsi.shape[1] < MIN_DIM:
        raise ImageTooSmall(
            f"Sobel needs at least {MIN_DIM}x{MIN_DIM}, got {gsi.shape[1]}x{gsi.shape[0]}"
        )
    p = np.pad(gsi.astype(np.float64), 1, mode="edge")
    tl, tc, tr = p[:-2, :-2], p[:-2, 1:-1], p[:-2, 2:]
    ml, mr = p[1:-1, :-2], p[1:-1, 2:]
    bl, bc, br = p[2:, :-2], p[2:, 1:-1], p[2:, 2:]
    gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl)
    gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr)
    mag = round_half_up(np.sqrt(gx * gx + gy * gy))
    return np.clip(mag, 0, 255).astype(np.uint8)


def rgb_to_hsv(img):
    """Piecewise RGB -> HSV with channels scaled to [0, 1] before conversion.

    H is in degrees; negative hue results wrap into [0, 360). When the chroma
    is zero the hue is 0 by convention, and S is 0 when V is 0.
    """
    img = validate_rgb(img)
    rgb = img.astype(np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    cmax = np.max(rgb, axis=-1)
    cmin = np.min(rgb, axis=-1)
    c = cmax - cmin

    safe_c = np.where(c == 0.0, 1.0, c)
    is_r = (cmax == r) & (c > 0.0)
    is_g = (cmax == g) & (c > 0.0) & ~is_r
    is_b = (c > 0.0) & ~is_r & ~is_g

    h = np.zeros_like(cmax)
    h = np.where(is_r, 60.0 * ((g - b) / safe_c), h)
    h = np.where(is_g, 60.0 * ((b - r) / safe_c + 2.0), h)
    h = np.where(is_b, 60.0 * ((r - g) / safe_c + 4.0), h)
    h = np.mod(h, 360.0)
    # mod can land exactly on 360.0 for tiny negative inputs
    h = np.where(h >= 360.0, 0.0, h)

    s = np.where(cmax > 0.0, c / np.where(cmax == 0.0, 1.0, cmax), 0.0)
    return np.stack([h, s, cmax], axis=-1)
