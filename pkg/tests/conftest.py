import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import write_dataset  # noqa: E402


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """3 classes x 6 images at 32x32: quick enough for CLI round trips."""
    root = tmp_path_factory.mktemp("small_ds")
    write_dataset(root, images_per_class=6, size=32, seed=777)
    return root
