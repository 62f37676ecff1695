"""Toy-scale weight-sharing supernet trainer.

Trains an elastic ResNet-style supernet on a small image dataset by random
sub-network sampling, then exports (encoding, cross-entropy) samples in the
loss-sample CSV schema consumed by the `codesign` pipeline. The two packages
share only that file contract and the fixed 16-dim encoding layout.
"""

from .encoding import ToyBackbone, encode16, sample_arch, validate_arch
from .train import train_supernet, load_checkpoint
from .export import export_loss_samples

__version__ = "0.1.0"
