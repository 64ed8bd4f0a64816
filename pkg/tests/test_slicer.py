import math

import numpy as np
import pytest

from mf2scf.errors import DimensionMismatch, ImageTooSmall
from mf2scf.slicer import SCALE_FRACTIONS, SHAPES, apply_mask, generate_masks


def mask_dict(width, height):
    return {mask_id: mask for mask_id, mask in generate_masks(width, height)}


class TestGenerateMasks:
    def test_exactly_twenty_in_fixed_order(self):
        masks = generate_masks(100, 100)
        assert len(masks) == 20
        expected = [(shape, k) for shape in SHAPES for k in range(4)]
        assert [mask_id for mask_id, _ in masks] == expected

    def test_square_largest_scale_is_95x95_block(self):
        m = mask_dict(100, 100)[("square", 3)]
        assert m.sum() == 95 * 95
        ys, xs = np.nonzero(m)
        assert ys.max() - ys.min() + 1 == 95
        assert xs.max() - xs.min() + 1 == 95

    def test_circle_area_matches_disk(self):
        m = mask_dict(100, 100)[("circle", 0)]
        expected = math.pi * 25.0**2
        assert abs(m.sum() - expected) <= 0.02 * expected

    def test_deterministic(self):
        a = generate_masks(64, 48)
        b = generate_masks(64, 48)
        for (id_a, mask_a), (id_b, mask_b) in zip(a, b):
            assert id_a == id_b
            assert np.array_equal(mask_a, mask_b)

    def test_area_non_decreasing_in_scale(self):
        for width, height in ((64, 64), (80, 50), (33, 97)):
            masks = mask_dict(width, height)
            for shape in SHAPES:
                areas = [masks[(shape, k)].sum() for k in range(4)]
                assert areas == sorted(areas), (shape, width, height, areas)

    def test_every_mask_nonempty(self):
        for _, mask in generate_masks(8, 8):
            assert mask.any()

    def test_ldc_rdc_mirror(self):
        for width, height in ((100, 100), (64, 40)):
            masks = mask_dict(width, height)
            for k in range(4):
                assert np.array_equal(
                    masks[("rdc", k)], masks[("ldc", k)][:, ::-1]
                )

    def test_too_small(self):
        with pytest.raises(ImageTooSmall):
            generate_masks(7, 100)


class TestApplyMask:
    def test_full_mask_is_identity(self):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 256, size=(12, 9, 3), dtype=np.uint8)
        out = apply_mask(img, np.ones((12, 9), dtype=bool))
        assert np.array_equal(out, img)

    def test_square_half_scale_crops_50x50(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, size=(100, 100, 3), dtype=np.uint8)
        out = apply_mask(img, mask_dict(100, 100)[("square", 0)])
        assert out.shape == (50, 50, 3)

    def test_circle_crop_corners_black(self):
        img = np.full((100, 100, 3), 255, dtype=np.uint8)
        out = apply_mask(img, mask_dict(100, 100)[("circle", 1)])
        assert tuple(out[0, 0]) == (0, 0, 0)
        assert tuple(out[-1, -1]) == (0, 0, 0)
        assert tuple(out[0, -1]) == (0, 0, 0)
        assert tuple(out[-1, 0]) == (0, 0, 0)

    def test_dimension_mismatch(self):
        img = np.zeros((10, 10, 3), dtype=np.uint8)
        with pytest.raises(DimensionMismatch):
            apply_mask(img, np.ones((9, 10), dtype=bool))
