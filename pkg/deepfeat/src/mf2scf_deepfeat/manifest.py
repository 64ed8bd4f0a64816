"""Reader for the slice manifest the primary pipeline exports."""

import json
from dataclasses import dataclass
from pathlib import Path

MANIFEST_MAGIC = "MF2SCF-SLICES v1"


@dataclass
class ManifestEntry:
    image_id: str
    label: str
    role: str
    original: Path
    slices: list  # 20 Paths in mask order


@dataclass
class Manifest:
    root: Path
    entries: list
    meta: dict

    def by_role(self, role):
        return [e for e in self.entries if e.role == role]

    @property
    def labels(self):
        return sorted({e.label for e in self.entries})


def read_manifest(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    data = json.loads(path.read_text(encoding="utf-8"))
    if data.get("format") != MANIFEST_MAGIC:
        raise ValueError(f"not a slice manifest: format={data.get('format')!r}")
    root = path.parent
    entries = []
    for raw in data["entries"]:
        original = Path(raw["original"])
        if not original.is_absolute():
            original = root / original
        entries.append(
            ManifestEntry(
                image_id=raw["image_id"],
                label=raw["label"],
                role=raw["role"],
                original=original,
                slices=[root / rel for rel in raw["slices"]],
            )
        )
    if not entries:
        raise ValueError(f"manifest {path} lists no images")
    meta = {k: v for k, v in data.items() if k != "entries"}
    return Manifest(root=root, entries=entries, meta=meta)
