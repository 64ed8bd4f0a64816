"""Seeded synthetic scene generator: three visually distinct classes.

checker  - warm-tinted checkerboards, cell size and tints vary per image
stripes  - green-tinted horizontal/vertical bands, width and phase vary
smooth   - cool-tinted low-frequency noise fields

Per-pixel noise is injected everywhere so pixel graphs have irregular spectra
(no two large components with accidentally identical dominant eigenvalues).
"""

import numpy as np
from PIL import Image

CLASS_NAMES = ("checker", "smooth", "stripes")


def _clip_u8(arr):
    return np.clip(np.rint(arr), 0, 255).astype(np.uint8)


def _tinted(base_a, base_b, pattern, rng, noise=7.0):
    """Blend two RGB tints by a 0/1 (or fractional) pattern, plus pixel noise."""
    h, w = pattern.shape
    img = np.empty((h, w, 3), dtype=np.float64)
    for ch in range(3):
        img[..., ch] = base_a[ch] + (base_b[ch] - base_a[ch]) * pattern
    img += rng.uniform(-noise, noise, size=img.shape)
    return _clip_u8(img)


def make_checker(rng, size=64):
    cell = int(rng.choice([6, 8, 10, 12]))
    px = rng.integers(0, cell)
    py = rng.integers(0, cell)
    ys, xs = np.mgrid[0:size, 0:size]
    pattern = (((ys + py) // cell + (xs + px) // cell) % 2).astype(np.float64)
    dark = (150 + rng.integers(-20, 21), 40 + rng.integers(-15, 16), 35 + rng.integers(-15, 16))
    bright = (235 + rng.integers(-15, 6), 150 + rng.integers(-25, 26), 60 + rng.integers(-20, 21))
    return _tinted(dark, bright, pattern, rng)


def make_stripes(rng, size=64):
    width = int(rng.choice([4, 5, 6, 8]))
    phase = int(rng.integers(0, width))
    ys, xs = np.mgrid[0:size, 0:size]
    axis = ys if rng.integers(0, 2) else xs
    pattern = (((axis + phase) // width) % 2).astype(np.float64)
    dark = (35 + rng.integers(-15, 16), 110 + rng.integers(-20, 21), 55 + rng.integers(-15, 16))
    bright = (120 + rng.integers(-20, 21), 225 + rng.integers(-20, 11), 120 + rng.integers(-20, 21))
    return _tinted(dark, bright, pattern, rng)


def make_smooth(rng, size=64):
    coarse = rng.uniform(0.0, 1.0, size=(6, 6))
    # bilinear upsample of the coarse field
    src = np.linspace(0, 5, size)
    i0 = np.clip(np.floor(src).astype(int), 0, 4)
    frac = src - i0
    rows = coarse[i0] * (1 - frac[:, None]) + coarse[i0 + 1] * frac[:, None]
    field = rows[:, i0] * (1 - frac[None, :]) + rows[:, i0 + 1] * frac[None, :]
    low = (55 + rng.integers(-15, 16), 55 + rng.integers(-15, 16), 150 + rng.integers(-20, 21))
    high = (120 + rng.integers(-20, 21), 100 + rng.integers(-20, 21), 230 + rng.integers(-15, 11))
    return _tinted(low, high, field, rng, noise=4.0)


_MAKERS = {"checker": make_checker, "stripes": make_stripes, "smooth": make_smooth}


def make_image(class_name, rng, size=64):
    return _MAKERS[class_name](rng, size=size)


def write_dataset(root, images_per_class=20, size=64, seed=20240601):
    """Write the directory-per-class dataset; returns the written file paths."""
    rng = np.random.default_rng(seed)
    paths = []
    for class_name in CLASS_NAMES:
        class_dir = root / class_name
        class_dir.mkdir(parents=True, exist_ok=True)
        for k in range(images_per_class):
            img = make_image(class_name, rng, size=size)
            path = class_dir / f"{class_name}_{k:03d}.png"
            Image.fromarray(img).save(path, format="PNG")
            paths.append(path)
    return paths
