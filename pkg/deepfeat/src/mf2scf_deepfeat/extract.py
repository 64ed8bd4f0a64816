"""f1 extraction and MF2SCF-F1 export.

For one image, each of its 21 inputs (original + 20 slices) runs through the
backbone; the per-block GAP vectors are averaged elementwise across the 21
inputs and the block averages are concatenated in block order. The export
file is written atomically (temp file + rename).
"""

import os
import tempfile
from pathlib import Path

import numpy as np
import torch

from .backbone import BLOCK_NAMES


class MissingSlice(FileNotFoundError):
    pass


def extract_f1(backbone, original, slice_paths):
    """f1 vector for one image from its original file plus 20 slice files.

    Each input runs through the backbone on its own (float32 convolutions
    change with batch size at the 1e-6 level, which would break the
    21-copies-equals-single contract); per-block GAP vectors are accumulated
    and averaged in float64, so the result is independent of input order.
    """
    paths = [Path(original), *map(Path, slice_paths)]
    absent = [str(p) for p in paths if not p.is_file()]
    if absent:
        raise MissingSlice(f"missing input files: {absent}")
    backbone.model.eval()
    per_block = [[] for _ in BLOCK_NAMES]
    with torch.no_grad():
        for path in paths:
            gaps = backbone.block_gaps(backbone.load_tensor(path)[None])
            for acc, gap in zip(per_block, gaps):
                acc.append(gap[0].numpy().astype("float64"))
    averaged = [sum(acc) / len(acc) for acc in per_block]
    return np.concatenate(averaged)


def export_features(backbone, manifest, out_path, log=None):
    """Write one MF2SCF-F1 record per manifest image; returns (dim, failures)."""
    widths = backbone.widths()
    dim = sum(widths)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    failures = []
    header = [
        f"MF2SCF-F1 v1 dim={dim}",
        f"# backbone=densenet121 blocks={len(BLOCK_NAMES)} widths={'+'.join(map(str, widths))}",
        f"# resize=stretch input_size={backbone.input_size}",
    ]
    fd, tmp = tempfile.mkstemp(dir=out_path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(header) + "\n")
            for entry in manifest.entries:
                try:
                    vec = extract_f1(backbone, entry.original, entry.slices)
                except (MissingSlice, OSError) as exc:
                    failures.append((entry.image_id, str(exc)))
                    continue
                values = ",".join(repr(float(v)) for v in vec)
                fh.write(f"{entry.image_id},{entry.label},{values}\n")
                if log:
                    log(f"exported {entry.image_id}")
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return dim, failures
