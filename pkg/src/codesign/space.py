"""Joint architecture + accelerator design space.

A candidate network is a ResNet-style backbone in which each residual block
contributes a fixed number of cell slots. A cell is either skipped (ratio 0)
or active with an expansion ratio in {0.5, 0.75, 1.0} that scales the middle
width of its bottleneck unit. The accelerator side is a single configurable
convolution engine described by its parallelism degrees (PF, PC, PV),
off-chip bandwidth BW (bits/cycle) and on-chip buffer capacity MEM (bytes).

This module owns the space itself: validation, enumeration, random sampling,
canonical repair of raw ratio strings, lowering an architecture to a concrete
layer list, and the fixed-width numeric encodings consumed by the surrogate
models (16 dims for the network, 19 dims with PF/PC/PV appended).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

RATIO_CHOICES = (0.5, 0.75, 1.0)
RATIO_ALPHABET = (0.0, 0.5, 0.75, 1.0)

ENCODING_CELLS = 16  # fixed width of the architecture encoding

PF_VALUES = (8, 16, 32, 64, 128)
PC_VALUES = (8, 16, 32, 64, 128)
PV_VALUES = (4, 8, 16)
BW_VALUES = (32, 64, 128, 256)

LAYER_KINDS = ("conv", "shortcut_add", "pool", "fc")
CONV_KERNELS = (1, 3, 7)


class SpaceError(ValueError):
    """Raised when an input violates a design-space invariant."""


class SpaceTooLargeError(SpaceError):
    """Raised when a requested count or enumeration exceeds the configured cap."""


@dataclass(frozen=True)
class LayerShape:
    """Shape record for one lowered layer.

    ``h_out = ceil(h_in / stride)`` holds for conv and shortcut layers
    (same-padding semantics). Pool and fc layers may additionally collapse
    to 1x1 (global reduction), in which case ``k`` records the window size.
    """

    kind: str
    c_in: int
    c_out: int
    h_in: int
    w_in: int
    h_out: int
    w_out: int
    k: int
    stride: int

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise SpaceError(f"unknown layer kind {self.kind!r}")
        if self.stride not in (1, 2):
            raise SpaceError(f"stride must be 1 or 2, got {self.stride}")
        for name in ("c_in", "c_out", "h_in", "w_in", "h_out", "w_out", "k"):
            if getattr(self, name) <= 0:
                raise SpaceError(f"{name} must be positive")
        if self.kind == "conv" and self.k not in CONV_KERNELS:
            raise SpaceError(f"conv kernel must be one of {CONV_KERNELS}, got {self.k}")
        global_reduce = self.kind in ("pool", "fc") and self.h_out == 1 and self.w_out == 1
        if not global_reduce:
            if self.h_out != -(-self.h_in // self.stride) or self.w_out != -(-self.w_in // self.stride):
                raise SpaceError(
                    f"{self.kind} layer output {self.h_out}x{self.w_out} inconsistent "
                    f"with input {self.h_in}x{self.w_in} at stride {self.stride}"
                )


@dataclass(frozen=True)
class BlockSpec:
    """One residual block: a run of cell slots sharing output width and feature size."""

    max_units: int
    out_channels: int
    feature_h: int
    feature_w: int
    first_unit_stride: int
    min_units: int = 2

    def __post_init__(self):
        if self.min_units < 2:
            raise SpaceError("min_units must be at least 2")
        if self.min_units > self.max_units:
            raise SpaceError("min_units cannot exceed max_units")
        if self.first_unit_stride not in (1, 2):
            raise SpaceError("first_unit_stride must be 1 or 2")
        if self.out_channels <= 0 or self.feature_h <= 0 or self.feature_w <= 0:
            raise SpaceError("block dimensions must be positive")


@dataclass(frozen=True)
class BackboneSpec:
    """Static description of the searchable backbone.

    ``blocks`` are ordered stem-to-head; feature sizes must be non-increasing
    and output channels strictly increasing across blocks. ``data_width`` is
    the byte width of one element on the accelerator (1 for 8-bit integers).
    """

    blocks: tuple[BlockSpec, ...]
    stem_layers: tuple[LayerShape, ...]
    input_resolution: int
    data_width: int = 1
    num_classes: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "stem_layers", tuple(self.stem_layers))
        if not self.blocks:
            raise SpaceError("backbone needs at least one block")
        if self.input_resolution <= 0 or self.data_width <= 0 or self.num_classes <= 0:
            raise SpaceError("backbone scalar fields must be positive")
        feats = [(b.feature_h, b.feature_w) for b in self.blocks]
        for prev, nxt in zip(feats, feats[1:]):
            if nxt[0] > prev[0] or nxt[1] > prev[1]:
                raise SpaceError("feature sizes must be non-increasing across blocks")
        chans = [b.out_channels for b in self.blocks]
        if any(nxt <= prev for prev, nxt in zip(chans, chans[1:])):
            raise SpaceError("out_channels must be strictly increasing across blocks")

    @property
    def total_cells(self) -> int:
        return sum(b.max_units for b in self.blocks)

    def block_slices(self) -> list[tuple[int, int]]:
        """(start, stop) index pair of each block's cell slots."""
        out, start = [], 0
        for b in self.blocks:
            out.append((start, start + b.max_units))
            start += b.max_units
        return out


def default_backbone() -> BackboneSpec:
    """The 16-cell backbone: 4 blocks of 4 cells, ResNet-50-style widths.

    Stem is a 7x7 stride-2 convolution to 64 channels followed by a 3x3
    stride-2 pooling, on 224x224 input, 1-byte elements.
    """
    stem = (
        LayerShape("conv", 3, 64, 224, 224, 112, 112, k=7, stride=2),
        LayerShape("pool", 64, 64, 112, 112, 56, 56, k=3, stride=2),
    )
    blocks = (
        BlockSpec(4, 256, 56, 56, first_unit_stride=1),
        BlockSpec(4, 512, 28, 28, first_unit_stride=2),
        BlockSpec(4, 1024, 14, 14, first_unit_stride=2),
        BlockSpec(4, 2048, 7, 7, first_unit_stride=2),
    )
    return BackboneSpec(blocks=blocks, stem_layers=stem, input_resolution=224, data_width=1)


@dataclass(frozen=True)
class ArchEncoding:
    """Per-cell expansion ratios; 0 marks a skipped cell.

    Canonical form: within each block the active cells form a prefix
    (skips trail) and every block keeps at least its minimum unit count.
    """

    ratios: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        bad = [r for r in self.ratios if r not in RATIO_ALPHABET]
        if bad:
            raise SpaceError(f"ratios outside {RATIO_ALPHABET}: {bad}")


@dataclass(frozen=True)
class HwDomain:
    """Candidate values per accelerator field; enumeration order follows field order."""

    pf: tuple[int, ...] = PF_VALUES
    pc: tuple[int, ...] = PC_VALUES
    pv: tuple[int, ...] = PV_VALUES
    bw: tuple[int, ...] = BW_VALUES
    mem: tuple[int, ...] = (4 * 2**20,)

    def __post_init__(self):
        for name in ("pf", "pc", "pv", "bw", "mem"):
            vals = tuple(int(v) for v in getattr(self, name))
            object.__setattr__(self, name, vals)
            if len(vals) == 0:
                raise SpaceError(f"hardware domain field {name} is empty")
            if any(v <= 0 for v in vals):
                raise SpaceError(f"hardware domain field {name} has non-positive values")

    @property
    def size(self) -> int:
        return len(self.pf) * len(self.pc) * len(self.pv) * len(self.bw) * len(self.mem)


def default_hw_domain() -> HwDomain:
    return HwDomain()


@dataclass(frozen=True)
class HwConfig:
    """One accelerator configuration point."""

    pf: int
    pc: int
    pv: int
    bw: int
    mem: int

    def __post_init__(self):
        for name in ("pf", "pc", "pv", "bw", "mem"):
            if getattr(self, name) <= 0:
                raise SpaceError(f"{name} must be positive")


@dataclass(frozen=True)
class CodesignPoint:
    """A joint (architecture, hardware) candidate."""

    arch: ArchEncoding
    hw: HwConfig


def validate_hw(hw: HwConfig, domain: HwDomain | None = None) -> None:
    """Check that each field of ``hw`` is drawn from ``domain`` (full default domain)."""
    domain = domain or HwDomain()
    for name in ("pf", "pc", "pv", "bw", "mem"):
        if getattr(hw, name) not in getattr(domain, name):
            raise SpaceError(f"{name}={getattr(hw, name)} not in domain {getattr(domain, name)}")


def unit_counts(arch: ArchEncoding, backbone: BackboneSpec) -> list[int]:
    """Active (non-zero) cell count per block."""
    return [
        sum(1 for r in arch.ratios[a:b] if r != 0.0)
        for a, b in backbone.block_slices()
    ]


def validate_arch(arch: ArchEncoding, backbone: BackboneSpec) -> None:
    """Raise SpaceError unless ``arch`` is canonical-form valid for ``backbone``."""
    if len(arch.ratios) != backbone.total_cells:
        raise SpaceError(
            f"encoding has {len(arch.ratios)} cells, backbone expects {backbone.total_cells}"
        )
    for (a, b), block in zip(backbone.block_slices(), backbone.blocks):
        chunk = arch.ratios[a:b]
        active = sum(1 for r in chunk if r != 0.0)
        if active < block.min_units:
            raise SpaceError(f"block {a}:{b} has {active} active cells, needs >= {block.min_units}")
        if any(r != 0.0 for r in chunk[active:]):
            raise SpaceError(f"block {a}:{b} has a skipped cell before an active one")
        # a zero inside the active prefix would contradict the count above


def is_valid_arch(arch: ArchEncoding, backbone: BackboneSpec) -> bool:
    try:
        validate_arch(arch, backbone)
    except SpaceError:
        return False
    return True


def enumerate_hw_configs(domain: HwDomain) -> list[HwConfig]:
    """All configurations in the domain, lexicographic in (pf, pc, pv, bw, mem)."""
    return [
        HwConfig(*combo)
        for combo in itertools.product(domain.pf, domain.pc, domain.pv, domain.bw, domain.mem)
    ]


def sample_arch(rng: np.random.Generator, backbone: BackboneSpec) -> ArchEncoding:
    """Draw a uniform random canonical architecture using ``rng`` in place."""
    ratios: list[float] = []
    for block in backbone.blocks:
        units = int(rng.integers(block.min_units, block.max_units + 1))
        picks = rng.integers(0, len(RATIO_CHOICES), size=units)
        ratios.extend(RATIO_CHOICES[i] for i in picks)
        ratios.extend(0.0 for _ in range(block.max_units - units))
    return ArchEncoding(tuple(ratios))


def random_arch(rng_seed: int, backbone: BackboneSpec) -> ArchEncoding:
    """Seeded wrapper around :func:`sample_arch`; identical seed, identical output."""
    return sample_arch(np.random.default_rng(rng_seed), backbone)


def sample_hw(rng: np.random.Generator, domain: HwDomain) -> HwConfig:
    """Draw one configuration uniformly per field using ``rng`` in place."""
    return HwConfig(
        pf=domain.pf[int(rng.integers(len(domain.pf)))],
        pc=domain.pc[int(rng.integers(len(domain.pc)))],
        pv=domain.pv[int(rng.integers(len(domain.pv)))],
        bw=domain.bw[int(rng.integers(len(domain.bw)))],
        mem=domain.mem[int(rng.integers(len(domain.mem)))],
    )


def canonicalize(ratios, backbone: BackboneSpec) -> ArchEncoding:
    """Repair a raw ratio string into the canonical valid space.

    Within each block, active ratios are compacted to the front preserving
    order and zeros trail. Blocks left below their minimum unit count get
    the first missing slots filled with ratio 0.5 (smallest legal capacity).
    Idempotent on canonical inputs.
    """
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != backbone.total_cells:
        raise SpaceError(
            f"raw string has {len(ratios)} cells, backbone expects {backbone.total_cells}"
        )
    bad = [r for r in ratios if r not in RATIO_ALPHABET]
    if bad:
        raise SpaceError(f"raw ratios outside {RATIO_ALPHABET}: {bad}")
    out: list[float] = []
    for (a, b), block in zip(backbone.block_slices(), backbone.blocks):
        active = [r for r in ratios[a:b] if r != 0.0]
        while len(active) < block.min_units:
            active.append(0.5)
        active.extend(0.0 for _ in range(block.max_units - len(active)))
        out.extend(active)
    return ArchEncoding(tuple(out))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def arch_to_layers(arch: ArchEncoding, backbone: BackboneSpec) -> list[LayerShape]:
    """Lower an architecture to its concrete layer list.

    Each active cell becomes a bottleneck unit: 1x1 conv down to
    round(E * C / 4) channels, 3x3 conv at the same width (stride 2 on the
    block's first cell when the block downsamples), 1x1 conv back to C, and
    a shortcut addition. Skipped cells contribute nothing. The list is
    stem layers, cells, global pooling, classifier.
    """
    validate_arch(arch, backbone)
    layers: list[LayerShape] = list(backbone.stem_layers)
    if layers:
        c, h, w = layers[-1].c_out, layers[-1].h_out, layers[-1].w_out
    else:
        c, h, w = 3, backbone.input_resolution, backbone.input_resolution
    for (a, b), block in zip(backbone.block_slices(), backbone.blocks):
        first_in_block = True
        for ratio in arch.ratios[a:b]:
            if ratio == 0.0:
                continue
            mid = _round_half_up(ratio * block.out_channels / 4)
            stride = block.first_unit_stride if first_in_block else 1
            h_out = -(-h // stride)
            w_out = -(-w // stride)
            layers.append(LayerShape("conv", c, mid, h, w, h, w, k=1, stride=1))
            layers.append(LayerShape("conv", mid, mid, h, w, h_out, w_out, k=3, stride=stride))
            layers.append(LayerShape("conv", mid, block.out_channels, h_out, w_out, h_out, w_out, k=1, stride=1))
            layers.append(
                LayerShape("shortcut_add", block.out_channels, block.out_channels,
                           h_out, w_out, h_out, w_out, k=1, stride=1)
            )
            c, h, w = block.out_channels, h_out, w_out
            first_in_block = False
    layers.append(LayerShape("pool", c, c, h, w, 1, 1, k=h, stride=1))
    layers.append(LayerShape("fc", c, backbone.num_classes, 1, 1, 1, 1, k=1, stride=1))
    return layers


def encode16(arch: ArchEncoding) -> np.ndarray:
    """Fixed 16-dim vector of per-cell ratios, zero-padded past the last cell."""
    if len(arch.ratios) > ENCODING_CELLS:
        raise SpaceError(f"architecture has more than {ENCODING_CELLS} cells")
    vec = np.zeros(ENCODING_CELLS)
    vec[: len(arch.ratios)] = arch.ratios
    return vec


def decode16(vec, backbone: BackboneSpec) -> ArchEncoding:
    """Inverse of :func:`encode16`; input must be valid for ``backbone``."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (ENCODING_CELLS,):
        raise SpaceError(f"expected a {ENCODING_CELLS}-dim vector, got shape {vec.shape}")
    n = backbone.total_cells
    if np.any(vec[n:] != 0.0):
        raise SpaceError("padding dimensions past the last cell must be zero")
    arch = ArchEncoding(tuple(float(v) for v in vec[:n]))
    validate_arch(arch, backbone)
    return arch


def encode19(point: CodesignPoint) -> np.ndarray:
    """16 architecture dims plus (PF, PC, PV); BW and MEM are deliberately absent."""
    return np.concatenate(
        [encode16(point.arch), [float(point.hw.pf), float(point.hw.pc), float(point.hw.pv)]]
    )


def decode19(vec, backbone: BackboneSpec, bw: int, mem: int) -> CodesignPoint:
    """Inverse of :func:`encode19` up to the supplied BW/MEM."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (ENCODING_CELLS + 3,):
        raise SpaceError(f"expected a {ENCODING_CELLS + 3}-dim vector, got shape {vec.shape}")
    arch = decode16(vec[:ENCODING_CELLS], backbone)
    hw = HwConfig(pf=int(vec[16]), pc=int(vec[17]), pv=int(vec[18]), bw=bw, mem=mem)
    return CodesignPoint(arch, hw)


COUNT_LIMIT = 2**63


def count_space(backbone: BackboneSpec, domain: HwDomain | None, mode: str) -> int:
    """Size of the joint space (architecture part only when ``domain`` is None).

    ``ratio_only`` treats every cell as a free 3-way ratio choice; the
    skip/depth structure is ignored. ``depth_aware`` counts canonical
    architectures: per block, sum over unit counts u in [min, max] of 3^u.
    """
    if mode not in ("ratio_only", "depth_aware"):
        raise SpaceError(f"unknown counting mode {mode!r}")
    if mode == "ratio_only":
        archs = 3 ** backbone.total_cells
    else:
        archs = 1
        for block in backbone.blocks:
            archs *= sum(3**u for u in range(block.min_units, block.max_units + 1))
    total = archs * (domain.size if domain is not None else 1)
    if total >= COUNT_LIMIT:
        raise SpaceTooLargeError(f"count {total} exceeds {COUNT_LIMIT}")
    return total


def enumerate_archs(backbone: BackboneSpec):
    """Yield every canonical architecture in deterministic order.

    Per block: unit counts ascending, then ratio assignments in
    lexicographic order over (0.5, 0.75, 1.0); blocks vary last-to-first.
    """
    per_block = []
    for block in backbone.blocks:
        options = []
        for units in range(block.min_units, block.max_units + 1):
            for combo in itertools.product(RATIO_CHOICES, repeat=units):
                options.append(combo + (0.0,) * (block.max_units - units))
        per_block.append(options)
    for assembly in itertools.product(*per_block):
        yield ArchEncoding(tuple(itertools.chain.from_iterable(assembly)))
