import numpy as np
import pytest

from mf2scf.colorfeat import color_feature, hsv_histograms
from mf2scf.imgproc import rgb_to_hsv


def solid_hsv(h, s, v, shape=(4, 5)):
    hsv = np.empty(shape + (3,), dtype=np.float64)
    hsv[..., 0] = h
    hsv[..., 1] = s
    hsv[..., 2] = v
    return hsv


class TestHsvHistograms:
    def test_all_red(self):
        hsv = rgb_to_hsv(np.tile(np.array([255, 0, 0], np.uint8), (6, 6, 1)))
        hh, hs, hv = hsv_histograms(hsv)
        assert hh[0] == 36 and hh.sum() == 36
        assert hs[255] == 36 and hs.sum() == 36
        assert hv[255] == 36 and hv.sum() == 36

    def test_hue_near_360_clamps_to_last_bin(self):
        hh, _, _ = hsv_histograms(solid_hsv(359.999, 0.5, 0.5))
        assert hh[255] == 20

    def test_counts_conserve_pixels(self):
        rng = np.random.default_rng(21)
        img = rng.integers(0, 256, size=(13, 11, 3), dtype=np.uint8)
        for counts in hsv_histograms(rgb_to_hsv(img)):
            assert counts.sum() == 13 * 11

    def test_s_v_bin_rounding(self):
        # S = 1 -> floor(255.5) = 255; S = 0 -> 0
        _, hs, hv = hsv_histograms(solid_hsv(0.0, 1.0, 0.0))
        assert hs[255] == 20
        assert hv[0] == 20


class TestColorFeature:
    def test_two_level_histogram(self):
        counts = np.zeros(256)
        counts[255] = 100
        f = color_feature((counts, counts, counts))
        seg = f[:256]
        assert seg[255] == 1.0
        assert np.all(seg[:255] == 0.0)

    def test_length_768(self):
        rng = np.random.default_rng(22)
        hists = tuple(rng.integers(0, 50, size=256) for _ in range(3))
        assert color_feature(hists).shape == (768,)

    def test_scale_invariance(self):
        rng = np.random.default_rng(23)
        hists = tuple(rng.integers(0, 50, size=256) for _ in range(3))
        a = color_feature(hists)
        b = color_feature(tuple(7 * h for h in hists))
        assert np.allclose(a, b, atol=0, rtol=0)

    def test_affine_invariance(self):
        rng = np.random.default_rng(24)
        hists = tuple(rng.integers(0, 50, size=256) for _ in range(3))
        a = color_feature(hists)
        b = color_feature(tuple(3 * h + 11 for h in hists))
        assert np.allclose(a, b, atol=1e-15)

    def test_constant_channel_all_zero(self):
        f = color_feature((np.full(256, 4), np.zeros(256), np.arange(256)))
        assert np.all(f[:512] == 0.0)
        assert f[512] == 0.0 and f[-1] == 1.0

    def test_each_segment_min_zero_max_one(self):
        rng = np.random.default_rng(25)
        img = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
        f = color_feature(hsv_histograms(rgb_to_hsv(img)))
        for k in range(3):
            seg = f[k * 256 : (k + 1) * 256]
            assert seg.min() == 0.0
            assert seg.max() == 1.0

    def test_pixel_order_invariance(self):
        rng = np.random.default_rng(26)
        img = rng.integers(0, 256, size=(10, 10, 3), dtype=np.uint8)
        shuffled = img.reshape(-1, 3)[rng.permutation(100)].reshape(10, 10, 3)
        a = color_feature(hsv_histograms(rgb_to_hsv(img)))
        b = color_feature(hsv_histograms(rgb_to_hsv(shuffled)))
        assert np.array_equal(a, b)

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            color_feature((np.zeros(255), np.zeros(256), np.zeros(256)))
