"""Small image-classification datasets with a fixed train/held-out split.

`digits` is the default: scikit-learn's bundled 8x8 handwritten digits, so
training needs no network access. `synthetic` generates 32x32 class-patterned
images deterministically. `cifar10` loads a local torchvision copy and only
downloads when explicitly allowed.

The split is fixed per dataset (permutation seed 12345, train = first
`subset` images): exports always evaluate on the same held-out images.
"""

from __future__ import annotations

import numpy as np
import torch

SPLIT_SEED = 12345


class DatasetError(RuntimeError):
    pass


def _split(images: torch.Tensor, labels: torch.Tensor, subset: int):
    perm = torch.randperm(len(images), generator=torch.Generator().manual_seed(SPLIT_SEED))
    subset = min(subset, len(images) - 1)
    train, held = perm[:subset], perm[subset:]
    return (images[train], labels[train]), (images[held], labels[held])


def _load_digits():
    from sklearn.datasets import load_digits

    raw = load_digits()
    images = torch.tensor(raw.images, dtype=torch.float32).unsqueeze(1)
    images = (images - images.mean()) / images.std()
    return images, torch.tensor(raw.target, dtype=torch.long), 1, 10


def _load_synthetic(n=2000, size=32, classes=10):
    rng = np.random.default_rng(0)
    protos = rng.normal(size=(classes, 1, size, size)).astype(np.float32)
    labels = rng.integers(0, classes, size=n)
    images = protos[labels] + 0.8 * rng.normal(size=(n, 1, size, size)).astype(np.float32)
    return (
        torch.tensor(images),
        torch.tensor(labels, dtype=torch.long),
        1,
        classes,
    )


def _load_cifar10(download: bool):
    try:
        from torchvision import datasets, transforms
    except ImportError as exc:
        raise DatasetError("cifar10 requires torchvision") from exc
    try:
        ds = datasets.CIFAR10(
            root="data", train=True, download=download,
            transform=transforms.ToTensor(),
        )
    except RuntimeError as exc:
        raise DatasetError(
            "cifar10 not found locally; pass --download to fetch it"
        ) from exc
    images = torch.stack([ds[i][0] for i in range(len(ds))])
    images = (images - images.mean()) / images.std()
    labels = torch.tensor(ds.targets, dtype=torch.long)
    return images, labels, 3, 10


def load_dataset(name: str, subset: int = 1000, download: bool = False):
    """Returns ((train_x, train_y), (held_x, held_y), image_channels, classes)."""
    if name == "digits":
        images, labels, chans, classes = _load_digits()
    elif name == "synthetic":
        images, labels, chans, classes = _load_synthetic()
    elif name == "cifar10":
        images, labels, chans, classes = _load_cifar10(download)
    else:
        raise DatasetError(f"unknown dataset {name!r} (digits, synthetic, cifar10)")
    train, held = _split(images, labels, subset)
    return train, held, chans, classes
