"""On-disk feature cache keyed by an extraction-parameter fingerprint.

One decimal-text file per image under <cache_dir>/<fingerprint>/, written
atomically (temp file + rename) so concurrent extractors never observe a
partial record. The fingerprint hashes exactly the parameters that influence
f2/f3 extraction, so changing any of them moves the cache to a fresh
directory and forces recomputation.
"""

import hashlib
import json
import os
import re
import tempfile
from pathlib import Path

import numpy as np

CACHE_MAGIC = "MF2SCF-FEAT v1"


def extraction_fingerprint(params):
    """Hex fingerprint of the extraction-relevant parameters (r, t, s, P)."""
    payload = json.dumps(
        {"P": params.p, "r": params.r, "s": params.s, "t": params.t},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def record_path(cache_dir, fingerprint, image_id):
    digest = hashlib.sha256(image_id.encode("utf-8")).hexdigest()[:10]
    safe = re.sub(r"[^A-Za-z0-9._-]", "_", image_id.replace("/", "__"))
    return Path(cache_dir) / fingerprint / f"{safe}__{digest}.feat"


def _fmt_vec(vec):
    return " ".join(repr(float(v)) for v in np.asarray(vec).ravel())


def store(path, image_id, f2, f3):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = "\n".join(
        [CACHE_MAGIC, f"id {image_id}", f"f2 {_fmt_vec(f2)}", f"f3 {_fmt_vec(f3)}"]
    )
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path, image_id):
    """Return (f2, f3) or None when no record exists; corrupt records raise."""
    path = Path(path)
    if not path.exists():
        return None
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) != 4 or lines[0] != CACHE_MAGIC:
        raise ValueError(f"corrupt cache record {path}")
    if lines[1] != f"id {image_id}":
        raise ValueError(f"cache record {path} belongs to {lines[1]!r}, not {image_id!r}")
    f2 = np.array([float(v) for v in lines[2][3:].split()], dtype=np.float64)
    f3 = np.array([float(v) for v in lines[3][3:].split()], dtype=np.float64)
    return f2, f3
