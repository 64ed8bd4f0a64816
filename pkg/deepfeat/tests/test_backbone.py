import numpy as np
import torch

from mf2scf_deepfeat.backbone import BLOCK_NAMES, Backbone, block_widths

from conftest import FAST_INPUT


class TestWidths:
    def test_four_blocks(self):
        assert len(BLOCK_NAMES) == 4

    def test_block_widths_sum_to_2816(self):
        widths = block_widths(input_size=FAST_INPUT)
        assert widths == [256, 512, 1024, 1024]
        assert sum(widths) == 2816


class TestLoadTensor:
    def test_shape_and_normalization(self, tmp_path):
        from PIL import Image

        img = np.full((20, 31, 3), 255, dtype=np.uint8)
        path = tmp_path / "white.png"
        Image.fromarray(img).save(path)
        backbone = Backbone(input_size=FAST_INPUT)
        x = backbone.load_tensor(path)
        assert x.shape == (3, FAST_INPUT, FAST_INPUT)
        # white pixel: (1 - mean) / std per channel
        expected = (1.0 - 0.485) / 0.229
        assert abs(float(x[0, 0, 0]) - expected) < 1e-6


class TestSaveLoad:
    def test_round_trip_preserves_outputs(self, tmp_path):
        backbone = Backbone(input_size=FAST_INPUT, seed=5)
        path = tmp_path / "bb.pt"
        backbone.save(path)
        loaded = Backbone.load(path)
        assert loaded.input_size == FAST_INPUT
        x = torch.zeros(1, 3, FAST_INPUT, FAST_INPUT)
        with torch.no_grad():
            backbone.model.eval()
            loaded.model.eval()
            a = torch.cat([g.ravel() for g in backbone.block_gaps(x)])
            b = torch.cat([g.ravel() for g in loaded.block_gaps(x)])
        assert torch.equal(a, b)

    def test_seed_controls_initialization(self):
        a = Backbone(input_size=FAST_INPUT, seed=1)
        b = Backbone(input_size=FAST_INPUT, seed=1)
        c = Backbone(input_size=FAST_INPUT, seed=2)
        pa = next(a.model.parameters())
        pb = next(b.model.parameters())
        pc = next(c.model.parameters())
        assert torch.equal(pa, pb)
        assert not torch.equal(pa, pc)
