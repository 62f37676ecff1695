"""Supernet training by random sub-network sampling.

Every optimizer step draws `samples_per_step` random sub-networks and
accumulates their cross-entropy gradients into the shared weights, the
single-path simplification of progressive-shrinking curricula. Seeded
throughout; runs are reproducible up to framework nondeterminism.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from .data import load_dataset
from .encoding import ToyBackbone, sample_arch
from .model import ElasticSupernet

CHECKPOINT_FORMAT = "supernet-sampler-checkpoint"


def evaluate_ce(model: ElasticSupernet, ratios, images, labels, batch_size: int = 512) -> float:
    """Cross-entropy of one sub-network over a fixed evaluation set."""
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for i in range(0, len(images), batch_size):
            x, y = images[i : i + batch_size], labels[i : i + batch_size]
            total += float(F.cross_entropy(model(x, ratios), y, reduction="sum"))
            count += len(y)
    return total / count


def train_supernet(
    dataset: str = "digits",
    epochs: int = 1,
    samples_per_step: int = 1,
    seed: int = 0,
    subset: int = 1000,
    batch_size: int = 16,
    lr: float = 0.01,
    download: bool = False,
    backbone: ToyBackbone | None = None,
    out: str | Path | None = None,
) -> dict:
    """Train the shared weights; returns (and optionally saves) the checkpoint."""
    (train_x, train_y), (held_x, held_y), chans, classes = load_dataset(
        dataset, subset=subset, download=download
    )
    if backbone is None:
        backbone = ToyBackbone(image_channels=chans, num_classes=classes)

    torch.manual_seed(seed)
    model = ElasticSupernet(backbone)
    maximal = tuple(1.0 for _ in range(backbone.total_cells))
    initial_ce = evaluate_ce(model, maximal, held_x, held_y)

    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    arch_rng = np.random.default_rng(seed)
    order_gen = torch.Generator().manual_seed(seed)
    model.train()
    steps = 0
    for _ in range(epochs):
        order = torch.randperm(len(train_x), generator=order_gen)
        for i in range(0, len(order), batch_size):
            idx = order[i : i + batch_size]
            x, y = train_x[idx], train_y[idx]
            optimizer.zero_grad()
            for _ in range(samples_per_step):
                ratios = sample_arch(arch_rng, backbone)
                F.cross_entropy(model(x, ratios), y).backward()
            optimizer.step()
            steps += 1
    final_ce = evaluate_ce(model, maximal, held_x, held_y)

    checkpoint = {
        "format": CHECKPOINT_FORMAT,
        "state_dict": model.state_dict(),
        "backbone": {
            "units_per_block": backbone.units_per_block,
            "min_units": backbone.min_units,
            "stem_channels": backbone.stem_channels,
            "block_channels": backbone.block_channels,
            "block_strides": backbone.block_strides,
            "image_channels": backbone.image_channels,
            "num_classes": backbone.num_classes,
        },
        "metadata": {
            "dataset": dataset,
            "subset": subset,
            "epochs": epochs,
            "samples_per_step": samples_per_step,
            "batch_size": batch_size,
            "lr": lr,
            "seed": seed,
            "steps": steps,
            "initial_max_ce": initial_ce,
            "final_max_ce": final_ce,
        },
    }
    if out is not None:
        torch.save(checkpoint, out)
    return checkpoint


def load_checkpoint(path) -> tuple[ElasticSupernet, ToyBackbone, dict]:
    """Rebuild the model from a saved checkpoint."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    checkpoint = torch.load(path, map_location="cpu", weights_only=False)
    if checkpoint.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path}: not a {CHECKPOINT_FORMAT} file")
    desc = checkpoint["backbone"]
    backbone = ToyBackbone(
        units_per_block=tuple(desc["units_per_block"]),
        min_units=desc["min_units"],
        stem_channels=desc["stem_channels"],
        block_channels=tuple(desc["block_channels"]),
        block_strides=tuple(desc["block_strides"]),
        image_channels=desc["image_channels"],
        num_classes=desc["num_classes"],
    )
    model = ElasticSupernet(backbone)
    model.load_state_dict(checkpoint["state_dict"])
    model.eval()
    return model, backbone, checkpoint["metadata"]
