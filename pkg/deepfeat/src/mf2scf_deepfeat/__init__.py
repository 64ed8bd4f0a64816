"""DenseNet-121 local-feature side of the mf2scf pipeline: fine-tune the
backbone on the slice manifest's fine-tune split and export per-image f1
vectors (block-level GAP averages over the original image plus its 20
slices) to the MF2SCF-F1 interchange format."""

from .backbone import BLOCK_NAMES, Backbone, block_widths
from .extract import export_features, extract_f1
from .finetune import fine_tune

__version__ = "0.1.0"

__all__ = [
    "BLOCK_NAMES",
    "Backbone",
    "block_widths",
    "extract_f1",
    "export_features",
    "fine_tune",
    "__version__",
]
