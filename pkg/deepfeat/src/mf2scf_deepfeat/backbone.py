"""DenseNet-121 backbone with taps on the four dense-block outputs.

The classifier head is never part of this wrapper: features come straight
from the dense blocks (pre-transition), global-average-pooled per channel.
Images are stretched to a square input size (aspect distortion accepted) and
normalized with the ImageNet statistics the architecture was designed for.
"""

import torch
from PIL import Image
from torchvision.models import densenet121

BLOCK_NAMES = ("denseblock1", "denseblock2", "denseblock3", "denseblock4")

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

DEFAULT_INPUT_SIZE = 224


class Backbone:
    """DenseNet-121 feature extractor; weights start random unless loaded."""

    def __init__(self, input_size=DEFAULT_INPUT_SIZE, seed=0):
        self.input_size = int(input_size)
        torch.manual_seed(seed)
        self.model = densenet121(weights=None)
        self._taps = {}
        for name in BLOCK_NAMES:
            getattr(self.model.features, name).register_forward_hook(self._tap(name))

    def _tap(self, name):
        def hook(_module, _inputs, output):
            self._taps[name] = output

        return hook

    def load_tensor(self, path):
        """Read an image file, stretch to the square input size, normalize."""
        with Image.open(path) as im:
            im = im.convert("RGB").resize(
                (self.input_size, self.input_size), Image.BILINEAR
            )
            x = torch.frombuffer(bytearray(im.tobytes()), dtype=torch.uint8)
        x = x.reshape(self.input_size, self.input_size, 3).permute(2, 0, 1).float()
        x = x / 255.0
        mean = torch.tensor(IMAGENET_MEAN).view(3, 1, 1)
        std = torch.tensor(IMAGENET_STD).view(3, 1, 1)
        return (x - mean) / std

    def block_gaps(self, batch):
        """Per-block GAP vectors for a batch: list of (N, width) tensors."""
        self._taps.clear()
        self.model.features(batch)
        return [self._taps[name].mean(dim=(2, 3)) for name in BLOCK_NAMES]

    def widths(self):
        with torch.no_grad():
            self.model.eval()
            gaps = self.block_gaps(torch.zeros(1, 3, self.input_size, self.input_size))
        return [int(g.shape[1]) for g in gaps]

    def save(self, path, extra=None):
        payload = {
            "arch": "densenet121",
            "input_size": self.input_size,
            "state_dict": self.model.state_dict(),
        }
        if extra:
            payload.update(extra)
        torch.save(payload, path)

    @classmethod
    def load(cls, path):
        payload = torch.load(path, map_location="cpu", weights_only=False)
        if payload.get("arch") != "densenet121":
            raise ValueError(f"unsupported backbone archive: {payload.get('arch')!r}")
        backbone = cls(input_size=payload["input_size"])
        backbone.model.load_state_dict(payload["state_dict"])
        return backbone

    def load_weights(self, path):
        """Initialize from a local state-dict file (e.g. pretrained weights)."""
        state = torch.load(path, map_location="cpu", weights_only=True)
        self.model.load_state_dict(state)


def block_widths(input_size=DEFAULT_INPUT_SIZE):
    return Backbone(input_size=input_size).widths()
