"""Backbone fine-tuning on the manifest's fine-tune split.

A temporary linear head (GAP of the final feature map -> class logits) is
attached for the duration of training and discarded afterwards; only the
backbone weights matter downstream. Optimizer: RMSProp, learning rate 0.001,
discounting factor 0.9, 10 epochs, batch size 32 by default.
"""

import torch
from torch import nn

EPOCHS = 10
BATCH_SIZE = 32
LEARNING_RATE = 0.001
DISCOUNTING = 0.9


class EmptyFineTuneSplit(ValueError):
    pass


def fine_tune(
    backbone,
    manifest,
    epochs=EPOCHS,
    batch_size=BATCH_SIZE,
    lr=LEARNING_RATE,
    alpha=DISCOUNTING,
    seed=0,
    log=None,
):
    """Fine-tune in place on role == "finetune" records; returns epoch losses."""
    records = manifest.by_role("finetune")
    if not records:
        raise EmptyFineTuneSplit(
            "manifest has no fine-tune records; re-slice with a nonzero "
            "finetune_fraction"
        )
    labels = manifest.labels
    label_code = {name: i for i, name in enumerate(labels)}
    counts = {name: 0 for name in labels}
    for rec in records:
        counts[rec.label] += 1
    empty = [name for name, c in counts.items() if c == 0]
    if empty:
        raise EmptyFineTuneSplit(f"classes with no fine-tune records: {empty}")

    torch.manual_seed(seed)
    xs = torch.stack([backbone.load_tensor(rec.original) for rec in records])
    ys = torch.tensor([label_code[rec.label] for rec in records], dtype=torch.long)

    model = backbone.model
    head = nn.Linear(1024, len(labels))
    model.train()
    params = list(model.parameters()) + list(head.parameters())
    optimizer = torch.optim.RMSprop(params, lr=lr, alpha=alpha)
    loss_fn = nn.CrossEntropyLoss()
    generator = torch.Generator().manual_seed(seed)

    epoch_losses = []
    n = xs.shape[0]
    for epoch in range(epochs):
        order = torch.randperm(n, generator=generator)
        total = 0.0
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            optimizer.zero_grad()
            feats = model.features(xs[idx])
            pooled = torch.relu(feats).mean(dim=(2, 3))
            loss = loss_fn(head(pooled), ys[idx])
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * idx.numel()
        epoch_losses.append(total / n)
        if log:
            log(f"epoch {epoch + 1}/{epochs} loss {epoch_losses[-1]:.6f}")
    model.eval()
    return epoch_losses
