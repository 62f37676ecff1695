"""Deterministic ground-truth models of the accelerator and the network loss.

Stands in for the physical board: the exact DSP/memory resource formulas of
the single-engine accelerator, a roofline cycle model for latency, a
utilization-scaled power model, and a closed-form synthetic cross-entropy.
Everything here is pure fixed-order arithmetic, so outputs are bit-identical
across runs and platforms and can serve both as surrogate training data and
as the reference in validation.

Resource formulas (single Conv engine, ping-pong buffered):
    dsp_used   = PF * PC * PV / 2
    mem_in     = max over conv layers of c_in * h_in * w_in * DW
    mem_weight = max over conv layers of c_in * PF * k^2 * DW
    mem_used   = 2 * (mem_in + mem_weight)

Latency (layer-by-layer, compute/memory roofline per conv layer):
    compute = ceil(c_out/PF) * ceil(c_in/PC) * ceil(h_out*w_out/PV) * k^2
    traffic = (c_in*h_in*w_in + c_in*c_out*k^2 + c_out*h_out*w_out) * DW bytes
    cycles  = max(compute, ceil(8*traffic/BW))
Non-conv layers run outside the Conv engine at ceil(c_out*h_out*w_out/PV).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .space import ArchEncoding, BackboneSpec, CodesignPoint, HwConfig, LayerShape, arch_to_layers, unit_counts

DEFAULT_CLOCK_MHZ = 200.0
STATIC_POWER_W = 20.0
DSP_POWER_W = 0.015


class OracleError(ValueError):
    """Raised on inputs the analytic models cannot evaluate."""


@dataclass(frozen=True)
class ResourceReport:
    dsp_used: int
    mem_in: int
    mem_weight: int
    mem_used: int


@dataclass(frozen=True)
class PerfReport:
    latency_ms: float
    power_w: float
    per_layer_cycles: tuple[int, ...]


def dsp_usage(hw: HwConfig) -> int:
    """DSP blocks consumed by the Conv engine: PF * PC * PV / 2."""
    return (hw.pf * hw.pc * hw.pv) // 2


def mem_usage(layers: list[LayerShape], hw: HwConfig, dw: int) -> ResourceReport:
    """On-chip buffer footprint for the worst-case layer, ping-pong doubled."""
    convs = [l for l in layers if l.kind == "conv"]
    if not convs:
        raise OracleError("layer list contains no conv layers")
    mem_in = max(l.c_in * l.h_in * l.w_in for l in convs) * dw
    mem_weight = max(l.c_in * hw.pf * l.k * l.k for l in convs) * dw
    return ResourceReport(
        dsp_used=dsp_usage(hw),
        mem_in=mem_in,
        mem_weight=mem_weight,
        mem_used=2 * (mem_in + mem_weight),
    )


def _layer_cycles(layer: LayerShape, hw: HwConfig, dw: int) -> tuple[int, int]:
    """(total cycles, compute cycles) for one layer; compute is 0 off the Conv engine."""
    if layer.kind != "conv":
        return -(-(layer.c_out * layer.h_out * layer.w_out) // hw.pv), 0
    compute = (
        -(-layer.c_out // hw.pf)
        * -(-layer.c_in // hw.pc)
        * -(-(layer.h_out * layer.w_out) // hw.pv)
        * layer.k * layer.k
    )
    traffic = (
        layer.c_in * layer.h_in * layer.w_in
        + layer.c_in * layer.c_out * layer.k * layer.k
        + layer.c_out * layer.h_out * layer.w_out
    ) * dw
    mem_cycles = -(-(traffic * 8) // hw.bw)
    return max(compute, mem_cycles), compute


def latency_ms(
    layers: list[LayerShape],
    hw: HwConfig,
    clock_mhz: float = DEFAULT_CLOCK_MHZ,
    dw: int = 1,
    static_power_w: float = STATIC_POWER_W,
    dsp_power_w: float = DSP_POWER_W,
) -> PerfReport:
    """Roofline latency of the sequential layer schedule, plus the matching power figure."""
    per_layer = [_layer_cycles(l, hw, dw) for l in layers]
    total = sum(c for c, _ in per_layer)
    compute = sum(comp for _, comp in per_layer)
    util = compute / total if total else 0.0
    return PerfReport(
        latency_ms=total / (clock_mhz * 1000.0),
        power_w=static_power_w + dsp_power_w * dsp_usage(hw) * util,
        per_layer_cycles=tuple(c for c, _ in per_layer),
    )


def power_w(
    layers: list[LayerShape],
    hw: HwConfig,
    clock_mhz: float = DEFAULT_CLOCK_MHZ,
    dw: int = 1,
    static_power_w: float = STATIC_POWER_W,
    dsp_power_w: float = DSP_POWER_W,
) -> float:
    """Static floor plus per-DSP dynamic power scaled by Conv-engine utilization."""
    return latency_ms(layers, hw, clock_mhz, dw, static_power_w, dsp_power_w).power_w


def synthetic_ce(arch: ArchEncoding, backbone: BackboneSpec) -> float:
    """Closed-form stand-in for a trained network's cross-entropy.

    Decreasing in total capacity S = sum of ratios, mildly penalizing
    unbalanced per-block depth: 1 + 2.5*exp(-S/5) + 0.1*std(unit counts).
    """
    s = sum(arch.ratios)
    counts = unit_counts(arch, backbone)
    mean = sum(counts) / len(counts)
    sigma = math.sqrt(sum((c - mean) ** 2 for c in counts) / len(counts))
    return 1.0 + 2.5 * math.exp(-s / 5.0) + 0.1 * sigma


@dataclass(frozen=True)
class OracleSettings:
    clock_mhz: float = DEFAULT_CLOCK_MHZ
    static_power_w: float = STATIC_POWER_W
    dsp_power_w: float = DSP_POWER_W


class Oracle:
    """Backbone-bound facade over the analytic models, with lowering memoized.

    Search and exhaustive evaluation hit the same architectures repeatedly;
    caching the layer lists (and objective triples) keeps those loops cheap
    without changing any value the pure functions would return.
    """

    def __init__(self, backbone: BackboneSpec, settings: OracleSettings = OracleSettings()):
        self.backbone = backbone
        self.settings = settings
        self._layers: dict[tuple[float, ...], list[LayerShape]] = {}
        self._objectives: dict[tuple, tuple[float, float, float]] = {}

    def layers(self, arch: ArchEncoding) -> list[LayerShape]:
        got = self._layers.get(arch.ratios)
        if got is None:
            got = arch_to_layers(arch, self.backbone)
            self._layers[arch.ratios] = got
        return got

    def ce(self, arch: ArchEncoding) -> float:
        return synthetic_ce(arch, self.backbone)

    def perf(self, point: CodesignPoint) -> PerfReport:
        return latency_ms(
            self.layers(point.arch),
            point.hw,
            clock_mhz=self.settings.clock_mhz,
            dw=self.backbone.data_width,
            static_power_w=self.settings.static_power_w,
            dsp_power_w=self.settings.dsp_power_w,
        )

    def latency(self, point: CodesignPoint) -> float:
        return self.objectives(point)[1]

    def power(self, point: CodesignPoint) -> float:
        return self.objectives(point)[2]

    def resources(self, point: CodesignPoint) -> ResourceReport:
        return mem_usage(self.layers(point.arch), point.hw, self.backbone.data_width)

    def objectives(self, point: CodesignPoint) -> tuple[float, float, float]:
        """(ce, latency_ms, power_w) with memoization on the point."""
        key = (point.arch.ratios, point.hw)
        got = self._objectives.get(key)
        if got is None:
            perf = self.perf(point)
            got = (self.ce(point.arch), perf.latency_ms, perf.power_w)
            self._objectives[key] = got
        return got
