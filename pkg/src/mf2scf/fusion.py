"""Feature fusion, stratified splitting, the accuracy metric, and deep-feature
file ingestion.

Fused vectors are laid out [f1 | f2 | f3]; f1 (deep activations) is optional
and its length is 0 when absent. f2 is the 295-value global texture feature,
f3 the 768-value color feature.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from .colorfeat import COLOR_FEATURE_LEN
from .errors import ClassTooSmall, LayoutMismatch, LengthMismatch
from .texture import GLOBAL_FEATURE_LEN

ROLE_TRAIN = "train"
ROLE_TEST = "test"
ROLE_FINETUNE = "finetune"


@dataclass(frozen=True)
class FeatureLayout:
    f1_len: int = 0
    f2_len: int = GLOBAL_FEATURE_LEN
    f3_len: int = COLOR_FEATURE_LEN

    @property
    def total_len(self):
        return self.f1_len + self.f2_len + self.f3_len


def fuse(f1, f2, f3):
    """Concatenate in f1, f2, f3 order; returns (vector, layout)."""
    f2 = np.asarray(f2, dtype=np.float64)
    f3 = np.asarray(f3, dtype=np.float64)
    if f2.shape != (GLOBAL_FEATURE_LEN,):
        raise LayoutMismatch(f"f2 must have length {GLOBAL_FEATURE_LEN}, got {f2.shape}")
    if f3.shape != (COLOR_FEATURE_LEN,):
        raise LayoutMismatch(f"f3 must have length {COLOR_FEATURE_LEN}, got {f3.shape}")
    if f1 is None:
        layout = FeatureLayout(f1_len=0)
        return np.concatenate([f2, f3]), layout
    f1 = np.asarray(f1, dtype=np.float64).ravel()
    layout = FeatureLayout(f1_len=f1.size)
    return np.concatenate([f1, f2, f3]), layout


def split_segments(vec, layout):
    """Inverse of fuse: recover (f1, f2, f3); f1 is None when its length is 0."""
    vec = np.asarray(vec)
    if vec.shape != (layout.total_len,):
        raise LayoutMismatch(
            f"vector length {vec.shape} does not match layout total {layout.total_len}"
        )
    a = layout.f1_len
    b = a + layout.f2_len
    f1 = vec[:a] if a else None
    return f1, vec[a:b], vec[b:]


@dataclass
class LabeledDataset:
    """Feature matrix plus integer labels; class code c means class_names[c]."""

    ids: list
    labels: np.ndarray
    X: np.ndarray
    layout: FeatureLayout
    class_names: list

    @property
    def n_classes(self):
        return len(self.class_names)

    def subset(self, idx):
        return LabeledDataset(
            ids=[self.ids[i] for i in idx],
            labels=self.labels[idx],
            X=self.X[idx],
            layout=self.layout,
            class_names=self.class_names,
        )


def build_dataset(records, layout):
    """Assemble a LabeledDataset from (image_id, class_name, vector) records.

    Raises LayoutMismatch when any vector length disagrees with the layout.
    """
    if not records:
        raise ValueError("no records to build a dataset from")
    class_names = sorted({name for _, name, _ in records})
    code = {name: i for i, name in enumerate(class_names)}
    ids = []
    labels = []
    vecs = []
    for image_id, name, vec in records:
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (layout.total_len,):
            raise LayoutMismatch(
                f"{image_id}: vector length {vec.size} != layout total {layout.total_len}"
            )
        ids.append(image_id)
        labels.append(code[name])
        vecs.append(vec)
    return LabeledDataset(
        ids=ids,
        labels=np.asarray(labels, dtype=np.int64),
        X=np.vstack(vecs),
        layout=layout,
        class_names=class_names,
    )


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")


def assign_roles(labels, n_classes, seed, test_fraction, finetune_fraction=0.0):
    """Stratified role per record: test, then finetune, then train.

    Per class, floor(test_fraction * n_c + 0.5) records go to test (at least
    one record always remains outside test). The finetune share is carved from
    the remainder the same way and is empty when finetune_fraction is 0.
    Deterministic given the seed.
    """
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    roles = np.empty(labels.size, dtype=object)
    for c in range(n_classes):
        idx = np.nonzero(labels == c)[0]
        if idx.size < 2:
            raise ClassTooSmall(f"class {c} has {idx.size} record(s); need at least 2")
        perm = idx[rng.permutation(idx.size)]
        n_test = min(int(math.floor(test_fraction * idx.size + 0.5)), idx.size - 1)
        n_ft = 0
        if finetune_fraction > 0.0:
            n_ft = int(math.floor(finetune_fraction * idx.size + 0.5))
            n_ft = max(0, min(n_ft, idx.size - n_test - 1))
        roles[perm[:n_test]] = ROLE_TEST
        roles[perm[n_test : n_test + n_ft]] = ROLE_FINETUNE
        roles[perm[n_test + n_ft :]] = ROLE_TRAIN
    return roles


def split(dataset, spec):
    """Stratified two-way split; returns sorted (train_idx, test_idx) arrays."""
    roles = assign_roles(
        dataset.labels, dataset.n_classes, spec.seed, spec.test_fraction
    )
    train_idx = np.sort(np.nonzero(roles == ROLE_TRAIN)[0])
    test_idx = np.sort(np.nonzero(roles == ROLE_TEST)[0])
    return train_idx, test_idx


def micro_accuracy(predictions, truths):
    """Fraction of exact matches."""
    predictions = list(predictions)
    truths = list(truths)
    if len(predictions) != len(truths):
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(truths)} truth labels"
        )
    if not truths:
        raise LengthMismatch("empty label sequences")
    hits = sum(1 for p, t in zip(predictions, truths) if p == t)
    return hits / len(truths)


_F1_HEADER = re.compile(r"MF2SCF-F1 v1 dim=(\d+)")


def read_f1_file(path):
    """Parse an MF2SCF-F1 interchange file.

    Returns (dim, records) with records a list of (image_id, class_label,
    vector). Comment lines starting with '#' after the header carry exporter
    metadata and are skipped.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        m = _F1_HEADER.fullmatch(header)
        if not m:
            raise LayoutMismatch(f"bad deep-feature header: {header!r}")
        dim = int(m.group(1))
        records = []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != dim + 2:
                raise LayoutMismatch(
                    f"line {lineno}: expected {dim} values, got {len(parts) - 2}"
                )
            vec = np.array([float(p) for p in parts[2:]], dtype=np.float64)
            records.append((parts[0], parts[1], vec))
    return dim, records
