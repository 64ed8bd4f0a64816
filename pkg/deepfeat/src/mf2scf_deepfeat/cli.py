"""deepfeat CLI: fine-tune the backbone on a slice manifest, export f1."""

import json
import sys

import click

from .backbone import DEFAULT_INPUT_SIZE, Backbone
from .extract import export_features
from .finetune import BATCH_SIZE, DISCOUNTING, EPOCHS, LEARNING_RATE, fine_tune
from .manifest import read_manifest


def _fail(message, code=1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """DenseNet-121 local-feature side of the mf2scf pipeline."""


@main.command("finetune")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Slice manifest written by 'mf2scf slice'.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Where to save the tuned backbone.")
@click.option("--input-size", type=int, default=DEFAULT_INPUT_SIZE, show_default=True)
@click.option("--epochs", type=int, default=EPOCHS, show_default=True)
@click.option("--batch-size", type=int, default=BATCH_SIZE, show_default=True)
@click.option("--lr", type=float, default=LEARNING_RATE, show_default=True)
@click.option("--alpha", type=float, default=DISCOUNTING, show_default=True, help="RMSProp discounting factor.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--weights", "weights_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Optional local state dict to start from (e.g. pretrained weights).")
def cmd_finetune(manifest_path, out_path, input_size, epochs, batch_size, lr, alpha, seed, weights_path):
    """Fine-tune on the manifest's fine-tune split and save the backbone."""
    try:
        manifest = read_manifest(manifest_path)
        backbone = Backbone(input_size=input_size, seed=seed)
        if weights_path:
            backbone.load_weights(weights_path)
        losses = fine_tune(
            backbone,
            manifest,
            epochs=epochs,
            batch_size=batch_size,
            lr=lr,
            alpha=alpha,
            seed=seed,
            log=lambda msg: click.echo(msg, err=True),
        )
        backbone.save(out_path, extra={"epoch_losses": losses, "seed": seed})
    except (ValueError, FileNotFoundError, OSError) as exc:
        _fail(exc)
    click.echo(json.dumps({"epoch_losses": losses, "backbone": str(out_path)}))


@main.command("export")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--backbone", "backbone_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="MF2SCF-F1 output file.")
def cmd_export(manifest_path, backbone_path, out_path):
    """Export one f1 record per manifest image to the interchange file."""
    try:
        manifest = read_manifest(manifest_path)
        backbone = Backbone.load(backbone_path)
        dim, failures = export_features(backbone, manifest, out_path)
    except (ValueError, FileNotFoundError, OSError) as exc:
        _fail(exc)
    click.echo(
        json.dumps(
            {
                "dim": dim,
                "records": len(manifest.entries) - len(failures),
                "failed": len(failures),
                "out": str(out_path),
            }
        )
    )
    if failures:
        for image_id, msg in failures:
            click.echo(f"error: {image_id}: {msg}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
