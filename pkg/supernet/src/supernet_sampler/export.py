"""Export (encoding, cross-entropy) samples in the codesign loss-sample schema.

The output is a CSV with header e0,...,e15,ce and one row per sampled
sub-network, evaluated on the dataset's held-out split. Floats use repr
(shortest exact round-trip), matching the consumer's serialization.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .data import load_dataset
from .encoding import ENCODING_CELLS, encode16, sample_arch
from .train import evaluate_ce, load_checkpoint

LOSS_HEADER = ",".join([f"e{i}" for i in range(ENCODING_CELLS)] + ["ce"])


def export_loss_samples(ckpt_path, n: int, seed: int, out_path) -> int:
    """Evaluate n random sub-networks on the held-out split; write the CSV."""
    if n < 1:
        raise ValueError("n must be >= 1")
    model, backbone, meta = load_checkpoint(ckpt_path)
    _, (held_x, held_y), _, _ = load_dataset(meta["dataset"], subset=meta["subset"])
    rng = np.random.default_rng(seed)
    lines = [LOSS_HEADER]
    for _ in range(n):
        ratios = sample_arch(rng, backbone)
        vec = encode16(ratios, backbone)
        ce = evaluate_ce(model, ratios, held_x, held_y)
        lines.append(",".join([repr(float(v)) for v in vec] + [repr(float(ce))]))
    Path(out_path).write_text("\n".join(lines) + "\n")
    return n
