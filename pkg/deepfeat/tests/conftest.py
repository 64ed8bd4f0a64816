import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

SMOKE_INPUT = 64
FAST_INPUT = 32


def _checker(rng, size):
    cell = int(rng.choice([4, 6, 8]))
    ys, xs = np.mgrid[0:size, 0:size]
    pattern = ((ys // cell + xs // cell) % 2).astype(np.float64)
    img = np.stack(
        [40 + 180 * pattern, 60 + 90 * pattern, 50 + 30 * pattern], axis=-1
    )
    img += rng.uniform(-8, 8, size=img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def _stripes(rng, size):
    width = int(rng.choice([3, 4, 6]))
    ys, _ = np.mgrid[0:size, 0:size]
    pattern = ((ys // width) % 2).astype(np.float64)
    img = np.stack(
        [50 + 40 * pattern, 80 + 160 * pattern, 120 + 90 * pattern], axis=-1
    )
    img += rng.uniform(-8, 8, size=img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def write_two_class_dataset(root, per_class=24, size=32, seed=4242):
    rng = np.random.default_rng(seed)
    for name, maker in (("alpha", _checker), ("beta", _stripes)):
        class_dir = root / name
        class_dir.mkdir(parents=True, exist_ok=True)
        for k in range(per_class):
            Image.fromarray(maker(rng, size)).save(class_dir / f"{name}_{k:03d}.png")


@pytest.fixture(scope="session")
def sliced_dataset(tmp_path_factory):
    """Dataset + slices + manifest, produced by the primary CLI.

    finetune_fraction 0.6667 over 24 images/class puts exactly 16 per class
    (32 total) into the fine-tune split: the smoke-test toy set.
    """
    base = tmp_path_factory.mktemp("deepfeat_ds")
    root = base / "dataset"
    write_two_class_dataset(root)
    cfg = base / "config.json"
    cfg.write_text(
        json.dumps({"finetune_fraction": 0.6667, "seed": 3}), encoding="utf-8"
    )
    out = base / "slices"
    subprocess.run(
        [
            sys.executable, "-m", "mf2scf.cli", "slice",
            "--config", str(cfg), "--dataset-root", str(root),
            "--out-dir", str(out),
        ],
        check=True,
        capture_output=True,
    )
    return {"root": root, "slices": out, "manifest": out / "manifest.json", "config": cfg}
