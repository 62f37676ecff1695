"""The scaled-down searchable backbone and its fixed-width encoding.

The encoding contract is shared with the codesign package: each cell carries
its expansion ratio (0 = skipped), skips trail within a block, every block
keeps at least `min_units` active cells, and vectors are zero-padded to 16
columns. The golden-vector fixture under tests/data pins this bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RATIO_CHOICES = (0.5, 0.75, 1.0)
ENCODING_CELLS = 16


@dataclass(frozen=True)
class ToyBackbone:
    """Two residual blocks of elastic bottleneck cells on small images."""

    units_per_block: tuple[int, ...] = (4, 4)
    min_units: int = 2
    stem_channels: int = 16
    block_channels: tuple[int, ...] = (32, 64)
    block_strides: tuple[int, ...] = (1, 2)
    image_channels: int = 1
    num_classes: int = 10

    @property
    def total_cells(self) -> int:
        return sum(self.units_per_block)

    def block_slices(self):
        out, start = [], 0
        for u in self.units_per_block:
            out.append((start, start + u))
            start += u
        return out


def validate_arch(ratios, backbone: ToyBackbone) -> None:
    ratios = tuple(ratios)
    if len(ratios) != backbone.total_cells:
        raise ValueError(f"expected {backbone.total_cells} ratios, got {len(ratios)}")
    for r in ratios:
        if r != 0.0 and r not in RATIO_CHOICES:
            raise ValueError(f"ratio {r} not in {(0.0,) + RATIO_CHOICES}")
    for a, b in backbone.block_slices():
        chunk = ratios[a:b]
        active = sum(1 for r in chunk if r != 0.0)
        if active < backbone.min_units:
            raise ValueError(f"block {a}:{b} has {active} active cells, needs {backbone.min_units}")
        if any(r != 0.0 for r in chunk[active:]):
            raise ValueError(f"block {a}:{b} has a skip before an active cell")


def sample_arch(rng: np.random.Generator, backbone: ToyBackbone) -> tuple[float, ...]:
    """Uniform unit count per block, uniform ratio per active cell, skips trailing."""
    ratios: list[float] = []
    for u_max in backbone.units_per_block:
        units = int(rng.integers(backbone.min_units, u_max + 1))
        picks = rng.integers(0, len(RATIO_CHOICES), size=units)
        ratios.extend(RATIO_CHOICES[i] for i in picks)
        ratios.extend(0.0 for _ in range(u_max - units))
    return tuple(ratios)


def encode16(ratios, backbone: ToyBackbone) -> np.ndarray:
    """Ratios zero-padded to the fixed 16-column layout."""
    validate_arch(ratios, backbone)
    if backbone.total_cells > ENCODING_CELLS:
        raise ValueError(f"backbone has more than {ENCODING_CELLS} cells")
    vec = np.zeros(ENCODING_CELLS)
    vec[: backbone.total_cells] = ratios
    return vec
