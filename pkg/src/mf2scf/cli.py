"""Command-line pipeline: slice export, feature extraction/caching, training,
prediction, and evaluation.

Datasets are directory-per-class: <root>/<class_name>/*.png|jpg|jpeg. The
image id of a record is its path relative to the dataset root. Configuration
comes from an optional JSON file plus flag overrides; flags win. All
diagnostics go to stderr, data to stdout; every subcommand exits 0 only on
full success.
"""

import dataclasses
import json
import multiprocessing
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import cache as feature_cache
from .cngraph import CnParams
from .errors import LayoutMismatch, Mf2scfError
from .fusion import (
    ROLE_TEST,
    ROLE_TRAIN,
    FeatureLayout,
    assign_roles,
    build_dataset,
    fuse,
    micro_accuracy,
    read_f1_file,
)
from .imgproc import load_image, save_image
from .pipeline import extract_image_features
from .reduction import lda_fit, lda_transform, pca_fit, pca_transform
from .slicer import SCALE_FRACTIONS, SHAPES, apply_mask, generate_masks, slice_filename
from .svm import Model, predict, predict_batch, svm_train

IMAGE_EXTS = {".png", ".jpg", ".jpeg"}
MANIFEST_MAGIC = "MF2SCF-SLICES v1"
REDUCTIONS = ("none", "pca", "lda")


@dataclass
class RunConfig:
    dataset_root: str = ""
    r: float = 3.0
    t: float = 0.315
    s: float = 5.0
    P: int = 8
    scale_fractions: tuple = SCALE_FRACTIONS
    test_fraction: float = 0.3
    finetune_fraction: float = 0.2
    seed: int = 0
    c_penalty: float = 1.0
    kernel_coefficient: float = None
    reduction: str = "none"
    pca_variance_threshold: float = 0.95
    deep_features: str = None

    def cn_params(self):
        return CnParams(r=self.r, t=self.t, s=self.s, p=self.P)

    def validate(self):
        self.cn_params()
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if not 0.0 <= self.finetune_fraction < 1.0:
            raise ValueError(
                f"finetune_fraction must be in [0, 1), got {self.finetune_fraction}"
            )
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"reduction must be one of {REDUCTIONS}, got {self.reduction}")
        if not 0.0 < self.pca_variance_threshold <= 1.0:
            raise ValueError(
                "pca_variance_threshold must be in (0, 1], got "
                f"{self.pca_variance_threshold}"
            )
        if tuple(self.scale_fractions) != tuple(SCALE_FRACTIONS):
            # masks are part of the deterministic contract with the deep side
            raise ValueError(
                f"scale_fractions are fixed to {SCALE_FRACTIONS} in this version"
            )
        return self


def load_config(config_path, **overrides):
    """Defaults, then JSON file values (unknown keys rejected), then flags."""
    cfg = RunConfig()
    known = {f.name for f in dataclasses.fields(RunConfig)}
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key, value in data.items():
            setattr(cfg, key, tuple(value) if key == "scale_fractions" else value)
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if cfg.kernel_coefficient is not None:
        click.echo(
            "warning: kernel_coefficient has no effect with a linear kernel; ignored",
            err=True,
        )
    cfg.validate()
    return cfg


def discover_dataset(root):
    """Sorted (image_id, class_name, path) triples for a directory-per-class tree."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root {root} is not a directory")
    entries = []
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for f in sorted(class_dir.iterdir()):
            if f.suffix.lower() in IMAGE_EXTS and f.is_file():
                entries.append((f"{class_dir.name}/{f.name}", class_dir.name, f))
    if not entries:
        raise FileNotFoundError(f"no class directories with images under {root}")
    return entries


def _labels_and_classes(entries):
    class_names = sorted({cls for _, cls, _ in entries})
    code = {name: i for i, name in enumerate(class_names)}
    labels = np.array([code[cls] for _, cls, _ in entries], dtype=np.int64)
    return labels, class_names


def _fail(message, code=1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Scene classification with fused graph-texture and color features."""


def _common_options(fn):
    for opt in reversed(
        [
            click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON run configuration; flags override file values."),
            click.option("--dataset-root", default=None, help="Directory-per-class dataset root."),
            click.option("--seed", type=int, default=None, help="Seed for the stratified split."),
        ]
    ):
        fn = opt(fn)
    return fn


@main.command("slice")
@_common_options
@click.option("--out-dir", required=True, type=click.Path(file_okay=False), help="Directory for slice PNGs and the manifest.")
def cmd_slice(config_path, dataset_root, seed, out_dir):
    """Export the 20 masked slices per image plus a manifest with role assignments."""
    try:
        cfg = load_config(config_path, dataset_root=dataset_root, seed=seed)
        entries = discover_dataset(cfg.dataset_root)
    except (ValueError, FileNotFoundError, Mf2scfError) as exc:
        _fail(exc)
    labels, class_names = _labels_and_classes(entries)
    roles = assign_roles(
        labels, len(class_names), cfg.seed, cfg.test_fraction, cfg.finetune_fraction
    )
    out_root = Path(out_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    failures = []
    manifest_entries = []
    for (image_id, cls, path), role in zip(entries, roles):
        try:
            rgb = load_image(path)
            masks = generate_masks(rgb.shape[1], rgb.shape[0])
        except Exception as exc:
            failures.append((image_id, str(exc)))
            continue
        class_out = out_root / cls
        class_out.mkdir(parents=True, exist_ok=True)
        slice_relpaths = []
        for (shape, scale_index), mask in masks:
            fname = slice_filename(path.stem, shape, scale_index)
            save_image(apply_mask(rgb, mask), class_out / fname)
            slice_relpaths.append(f"{cls}/{fname}")
        manifest_entries.append(
            {
                "image_id": image_id,
                "label": cls,
                "role": role,
                "original": str(Path(cfg.dataset_root).resolve() / image_id),
                "slices": slice_relpaths,
            }
        )
    manifest = {
        "format": MANIFEST_MAGIC,
        "mask_policy": "crop_bbox_zero_fill",
        "shapes": list(SHAPES),
        "scale_fractions": list(cfg.scale_fractions),
        "seed": cfg.seed,
        "test_fraction": cfg.test_fraction,
        "finetune_fraction": cfg.finetune_fraction,
        "entries": manifest_entries,
    }
    manifest_path = out_root / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    click.echo(f"{len(manifest_entries) * 20} slices, manifest {manifest_path}")
    if failures:
        for image_id, msg in failures:
            click.echo(f"error: {image_id}: {msg}", err=True)
        sys.exit(1)


def _extract_one(args):
    image_id, path, params = args
    rgb = load_image(path)
    feats = extract_image_features(rgb, params)
    return image_id, feats.f2, feats.f3


@main.command("extract")
@_common_options
@click.option("--cache-dir", required=True, type=click.Path(file_okay=False), help="Feature cache directory.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes for extraction.")
@click.option("--debug-images", type=click.Path(file_okay=False), default=None, help="Also write the quantized cc/dc/ec planes as PNGs here.")
@click.option("--debug-csv", type=click.Path(dir_okay=False), default=None, help="Also dump one CSV record per image: id, f2 values, f3 values.")
def cmd_extract(config_path, dataset_root, seed, cache_dir, jobs, debug_images, debug_csv):
    """Compute and cache f2/f3 for every dataset image (cache hits are skipped)."""
    try:
        cfg = load_config(config_path, dataset_root=dataset_root, seed=seed)
        entries = discover_dataset(cfg.dataset_root)
    except (ValueError, FileNotFoundError, Mf2scfError) as exc:
        _fail(exc)
    params = cfg.cn_params()
    fingerprint = feature_cache.extraction_fingerprint(params)
    hits = 0
    todo = []
    for image_id, _, path in entries:
        rp = feature_cache.record_path(cache_dir, fingerprint, image_id)
        if feature_cache.load(rp, image_id) is not None:
            hits += 1
        else:
            todo.append((image_id, path, params))
    failures = []
    computed = 0
    debug_rows = {}

    def handle(image_id, f2, f3):
        nonlocal computed
        rp = feature_cache.record_path(cache_dir, fingerprint, image_id)
        feature_cache.store(rp, image_id, f2, f3)
        computed += 1
        if debug_csv:
            debug_rows[image_id] = (f2, f3)

    if jobs > 1 and todo:
        with multiprocessing.Pool(jobs) as pool:
            for result in pool.imap(_extract_one, todo):
                handle(*result)
    else:
        for job in todo:
            try:
                handle(*_extract_one(job))
            except Exception as exc:
                failures.append((job[0], str(exc)))
    if debug_images:
        dbg_root = Path(debug_images)
        failed_ids = {f for f, _ in failures}
        for image_id, _, path in entries:
            if image_id in failed_ids:
                continue
            try:
                planes = {}
                extract_image_features(load_image(path), params, planes_out=planes)
            except Exception as exc:
                failures.append((image_id, str(exc)))
                continue
            out_dir = dbg_root / Path(image_id).parent
            out_dir.mkdir(parents=True, exist_ok=True)
            stem = Path(image_id).stem
            for kind in ("cc", "dc", "ec"):
                save_image(planes[kind], out_dir / f"{stem}__{kind}.png")
    if debug_csv:
        with open(debug_csv, "w", encoding="utf-8", newline="\n") as fh:
            for image_id in sorted(debug_rows):
                f2, f3 = debug_rows[image_id]
                values = ",".join(repr(float(v)) for v in np.concatenate([f2, f3]))
                fh.write(f"{image_id},{values}\n")
    click.echo(
        json.dumps(
            {
                "cached": hits,
                "extracted": computed,
                "failed": len(failures),
                "fingerprint": fingerprint,
            },
            sort_keys=True,
        )
    )
    if failures:
        for image_id, msg in failures:
            click.echo(f"error: {image_id}: {msg}", err=True)
        sys.exit(1)


def _load_cached_dataset(cfg, entries, cache_dir, deep_path):
    """Assemble the fused dataset from the cache plus an optional deep file."""
    params = cfg.cn_params()
    fingerprint = feature_cache.extraction_fingerprint(params)
    missing = []
    cached = {}
    for image_id, cls, _ in entries:
        rp = feature_cache.record_path(cache_dir, fingerprint, image_id)
        rec = feature_cache.load(rp, image_id)
        if rec is None:
            missing.append(image_id)
        else:
            cached[image_id] = rec
    if missing:
        raise FileNotFoundError(
            f"{len(missing)} image(s) not in cache (run extract first): "
            + ", ".join(missing[:5])
            + ("..." if len(missing) > 5 else "")
        )
    deep = None
    f1_len = 0
    if deep_path:
        f1_len, records = read_f1_file(deep_path)
        deep = {image_id: vec for image_id, _, vec in records}
    layout = FeatureLayout(f1_len=f1_len)
    fused_records = []
    for image_id, cls, _ in entries:
        f2, f3 = cached[image_id]
        f1 = None
        if deep is not None:
            if image_id not in deep:
                raise LayoutMismatch(f"deep-feature file has no record for {image_id}")
            f1 = deep[image_id]
        vec, _ = fuse(f1, f2, f3)
        fused_records.append((image_id, cls, vec))
    return build_dataset(fused_records, layout), fingerprint


def _fit_reduction(cfg, X_train, y_train):
    if cfg.reduction == "pca":
        projection = pca_fit(X_train, cfg.pca_variance_threshold)
        return projection, pca_transform(projection, X_train)
    if cfg.reduction == "lda":
        projection = lda_fit(X_train, y_train)
        return projection, lda_transform(projection, X_train)
    return None, X_train


def _evaluation_report(model, dataset, test_idx, fingerprint, reduction_info):
    test = dataset.subset(test_idx)
    predictions = predict_batch(model, test.X, fingerprint=fingerprint)
    truths = [dataset.class_names[c] for c in test.labels]
    confusion = [[0] * dataset.n_classes for _ in range(dataset.n_classes)]
    code = {name: i for i, name in enumerate(dataset.class_names)}
    for pred, truth in zip(predictions, truths):
        confusion[code[truth]][code[pred]] += 1
    per_class = {}
    for name in dataset.class_names:
        row = confusion[code[name]]
        total = sum(row)
        per_class[name] = (row[code[name]] / total) if total else None
    return {
        "micro_accuracy": micro_accuracy(predictions, truths),
        "per_class_accuracy": per_class,
        "confusion_matrix": confusion,
        "feature_layout": {
            "f1_len": dataset.layout.f1_len,
            "f2_len": dataset.layout.f2_len,
            "f3_len": dataset.layout.f3_len,
        },
        "config_fingerprint": fingerprint,
        "reduction": reduction_info,
    }


def _emit_report(report, report_path):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")
        click.echo(f"micro_accuracy {report['micro_accuracy']!r} report {report_path}")
    else:
        click.echo(text, nl=False)


@main.command("train")
@_common_options
@click.option("--cache-dir", required=True, type=click.Path(file_okay=False))
@click.option("--model-out", required=True, type=click.Path(dir_okay=False), help="Where to write the trained model.")
@click.option("--deep-features", "deep_features", type=click.Path(exists=True, dir_okay=False), default=None, help="MF2SCF-F1 interchange file with f1 vectors.")
@click.option("--reduction", type=click.Choice(REDUCTIONS), default=None, help="Dimensionality reduction before the SVM.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None, help="Write the evaluation report JSON here (stdout otherwise).")
def cmd_train(config_path, dataset_root, seed, cache_dir, model_out, deep_features, reduction, report_path):
    """Stratified split, optional PCA/LDA, SVM training, model file + report."""
    try:
        cfg = load_config(
            config_path,
            dataset_root=dataset_root,
            seed=seed,
            deep_features=deep_features,
            reduction=reduction,
        )
        entries = discover_dataset(cfg.dataset_root)
        dataset, fingerprint = _load_cached_dataset(
            cfg, entries, cache_dir, cfg.deep_features
        )
        finetune_fraction = cfg.finetune_fraction if cfg.deep_features else 0.0
        roles = assign_roles(
            dataset.labels,
            dataset.n_classes,
            cfg.seed,
            cfg.test_fraction,
            finetune_fraction,
        )
        train_idx = np.sort(np.nonzero(roles == ROLE_TRAIN)[0])
        test_idx = np.sort(np.nonzero(roles == ROLE_TEST)[0])
        train = dataset.subset(train_idx)
        projection, X_train = _fit_reduction(cfg, train.X, train.labels)
        std, weights, bias, history = svm_train(
            X_train, train.labels, dataset.n_classes, cfg.c_penalty, cfg.seed
        )
        model = Model(
            class_names=dataset.class_names,
            weights=weights,
            bias=bias,
            standardizer=std,
            projection=projection,
            layout=dataset.layout,
            fingerprint=fingerprint,
            c_penalty=cfg.c_penalty,
            objective_history=history,
        )
        model.save(model_out)
        reduction_info = {
            "kind": cfg.reduction,
            "components": projection.n_components if projection is not None else None,
        }
        report = _evaluation_report(model, dataset, test_idx, fingerprint, reduction_info)
    except (ValueError, FileNotFoundError, Mf2scfError) as exc:
        _fail(exc)
    _emit_report(report, report_path)


@main.command("eval")
@_common_options
@click.option("--cache-dir", required=True, type=click.Path(file_okay=False))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--deep-features", "deep_features", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
def cmd_eval(config_path, dataset_root, seed, cache_dir, model_path, deep_features, report_path):
    """Evaluate a stored model on the config's stratified test split."""
    try:
        cfg = load_config(
            config_path, dataset_root=dataset_root, seed=seed, deep_features=deep_features
        )
        model = Model.load(model_path)
        entries = discover_dataset(cfg.dataset_root)
        dataset, fingerprint = _load_cached_dataset(
            cfg, entries, cache_dir, cfg.deep_features
        )
        if fingerprint != model.fingerprint:
            raise LayoutMismatch(
                f"extraction fingerprint {fingerprint} does not match model "
                f"fingerprint {model.fingerprint}"
            )
        finetune_fraction = cfg.finetune_fraction if cfg.deep_features else 0.0
        roles = assign_roles(
            dataset.labels,
            dataset.n_classes,
            cfg.seed,
            cfg.test_fraction,
            finetune_fraction,
        )
        test_idx = np.sort(np.nonzero(roles == ROLE_TEST)[0])
        kind = "none"
        components = None
        if model.projection is not None:
            kind = "pca" if hasattr(model.projection, "eigenvalues") else "lda"
            components = model.projection.n_components
        report = _evaluation_report(
            model, dataset, test_idx, fingerprint, {"kind": kind, "components": components}
        )
    except (ValueError, FileNotFoundError, Mf2scfError) as exc:
        _fail(exc)
    _emit_report(report, report_path)


@main.command("predict")
@_common_options
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--deep-features", "deep_features", type=click.Path(exists=True, dir_okay=False), default=None, help="Required when the model was trained with deep features; records are keyed by the given image paths.")
@click.argument("images", nargs=-1, required=True)
def cmd_predict(config_path, dataset_root, seed, model_path, deep_features, images):
    """Predict labels for image files, one '<path>\\t<label>' line per input."""
    try:
        cfg = load_config(config_path, dataset_root=dataset_root, seed=seed)
        model = Model.load(model_path)
    except (ValueError, FileNotFoundError, Mf2scfError) as exc:
        _fail(exc)
    params = cfg.cn_params()
    fingerprint = feature_cache.extraction_fingerprint(params)
    deep = None
    if model.layout.f1_len > 0:
        if not deep_features:
            _fail(
                "model was trained with deep features; pass --deep-features "
                "with records keyed by the image paths"
            )
        _, records = read_f1_file(deep_features)
        deep = {image_id: vec for image_id, _, vec in records}
    had_error = False
    for image_path in images:
        try:
            rgb = load_image(image_path)
            feats = extract_image_features(rgb, params)
            f1 = None
            if deep is not None:
                if image_path not in deep:
                    raise LayoutMismatch(f"no deep-feature record for {image_path}")
                f1 = deep[image_path]
            vec, layout = fuse(f1, feats.f2, feats.f3)
            if layout.f1_len != model.layout.f1_len:
                raise LayoutMismatch(
                    f"f1 length {layout.f1_len} does not match model "
                    f"layout {model.layout.f1_len}"
                )
            label = predict(model, vec, fingerprint=fingerprint)
        except Exception as exc:
            click.echo(f"error: {image_path}: {exc}", err=True)
            had_error = True
            continue
        click.echo(f"{image_path}\t{label}")
    if had_error:
        sys.exit(1)


if __name__ == "__main__":
    main()
