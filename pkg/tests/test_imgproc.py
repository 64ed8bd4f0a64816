import numpy as np
import pytest
from PIL import Image

from mf2scf.errors import ImageTooSmall
from mf2scf.imgproc import load_image, rgb_to_hsv, sobel_gradient, to_grayscale

from oracles import hsv_to_rgb_reference


def solid(r, g, b, h=4, w=4):
    img = np.zeros((h, w, 3), dtype=np.uint8)
    img[..., 0] = r
    img[..., 1] = g
    img[..., 2] = b
    return img


class TestGrayscale:
    def test_all_black(self):
        assert np.all(to_grayscale(solid(0, 0, 0)) == 0)

    def test_white_weights_sum_to_one(self):
        assert np.all(to_grayscale(solid(255, 255, 255)) == 255)

    def test_pure_red_luma(self):
        # 0.299 * 255 = 76.245 -> 76
        assert np.all(to_grayscale(solid(255, 0, 0)) == 76)

    def test_idempotent_on_gray(self):
        for v in range(256):
            assert np.all(to_grayscale(solid(v, v, v)) == v)

    def test_rejects_tiny_images(self):
        with pytest.raises(ImageTooSmall):
            to_grayscale(np.zeros((2, 5, 3), dtype=np.uint8))


class TestSobel:
    def test_constant_is_zero(self):
        assert np.all(sobel_gradient(np.full((6, 7), 31, dtype=np.uint8)) == 0)

    def test_horizontal_ramp(self):
        # I(x, y) = x: gx = 8 at interior pixels (hand 3x3 convolution), gy = 0
        ramp = np.tile(np.arange(10, dtype=np.uint8), (6, 1))
        mag = sobel_gradient(ramp)
        assert np.all(mag[1:-1, 1:-1] == 8)

    def test_hard_step_clamps(self):
        # columns 0..4 are 0, columns 5..9 are 255: 4*255 > 255 so magnitudes clamp
        step = np.zeros((6, 10), dtype=np.uint8)
        step[:, 5:] = 255
        mag = sobel_gradient(step)
        assert np.all(mag[1:-1, 4] == 255)
        assert np.all(mag[1:-1, 5] == 255)

    def test_too_small(self):
        with pytest.raises(ImageTooSmall):
            sobel_gradient(np.zeros((2, 5), dtype=np.uint8))


class TestHsv:
    def test_black(self):
        hsv = rgb_to_hsv(solid(0, 0, 0))
        assert np.allclose(hsv, 0.0)

    def test_pure_red(self):
        hsv = rgb_to_hsv(solid(255, 0, 0))
        assert np.allclose(hsv[..., 0], 0.0)
        assert np.allclose(hsv[..., 1], 1.0)
        assert np.allclose(hsv[..., 2], 1.0)

    def test_pure_green(self):
        hsv = rgb_to_hsv(solid(0, 255, 0))
        assert np.allclose(hsv[..., 0], 120.0)
        assert np.allclose(hsv[..., 1], 1.0)
        assert np.allclose(hsv[..., 2], 1.0)

    def test_value_is_max_channel_exactly(self):
        rng = np.random.default_rng(5)
        img = rng.integers(0, 256, size=(13, 9, 3), dtype=np.uint8)
        hsv = rgb_to_hsv(img)
        assert np.array_equal(hsv[..., 2], img.max(axis=-1) / 255.0)

    def test_hue_range(self):
        rng = np.random.default_rng(6)
        img = rng.integers(0, 256, size=(20, 20, 3), dtype=np.uint8)
        hsv = rgb_to_hsv(img)
        assert hsv[..., 0].min() >= 0.0
        assert hsv[..., 0].max() < 360.0
        assert hsv[..., 1].min() >= 0.0 and hsv[..., 1].max() <= 1.0

    def test_round_trip_against_reference_inverse(self):
        rng = np.random.default_rng(7)
        img = rng.integers(0, 256, size=(25, 40, 3), dtype=np.uint8)
        hsv = rgb_to_hsv(img)
        for y in range(0, 25, 3):
            for x in range(0, 40, 3):
                back = hsv_to_rgb_reference(*hsv[y, x])
                for ch in range(3):
                    assert abs(back[ch] - int(img[y, x, ch])) <= 1


class TestLoadImage:
    def test_png_with_alpha_dropped(self, tmp_path):
        rgba = np.zeros((5, 4, 4), dtype=np.uint8)
        rgba[..., 0] = 200
        rgba[..., 3] = 17
        path = tmp_path / "a.png"
        Image.fromarray(rgba, mode="RGBA").save(path)
        img = load_image(path)
        assert img.shape == (5, 4, 3)
        assert np.all(img[..., 0] == 200)

    def test_jpeg_reads(self, tmp_path):
        src = np.full((8, 8, 3), 128, dtype=np.uint8)
        path = tmp_path / "b.jpg"
        Image.fromarray(src).save(path, format="JPEG")
        img = load_image(path)
        assert img.shape == (8, 8, 3)
        assert img.dtype == np.uint8
