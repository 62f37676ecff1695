"""Run configuration: a flat key/value file with a default for every field.

An empty (or missing) config reproduces the full default space: the 16-cell
backbone, the 300-configuration hardware domain, 200 MHz clock, 50-iteration
GP training and the standard GA settings. Values are plain scalars or
comma-separated integer lists; `#` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .ga import DEFAULT_DSP_BUDGET, DEFAULT_GAMMA, DEFAULT_MEM_BUDGET, GaConfig
from .oracle import OracleSettings
from .space import BackboneSpec, BlockSpec, HwDomain, LayerShape, SpaceError


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # backbone
    block_units: tuple[int, ...] = (4, 4, 4, 4)
    min_units: int = 2
    out_channels: tuple[int, ...] = (256, 512, 1024, 2048)
    features: tuple[int, ...] = (56, 28, 14, 7)
    block_strides: tuple[int, ...] = (1, 2, 2, 2)
    input_resolution: int = 224
    data_width: int = 1
    num_classes: int = 1000
    stem: str = "imagenet"  # imagenet: 7x7/2 conv + 3x3/2 pool; small: 3x3/2 conv
    stem_channels: int = 64
    # hardware domain
    pf_domain: tuple[int, ...] = (8, 16, 32, 64, 128)
    pc_domain: tuple[int, ...] = (8, 16, 32, 64, 128)
    pv_domain: tuple[int, ...] = (4, 8, 16)
    bw_domain: tuple[int, ...] = (32, 64, 128, 256)
    mem_domain: tuple[int, ...] = (4 * 2**20,)
    # sampling: bw/mem held fixed so the 19-dim encoding explains its targets
    sample_bw: int = 256
    sample_mem: int = 4 * 2**20
    # oracle constants
    clock_mhz: float = 200.0
    static_power_w: float = 20.0
    dsp_power_w: float = 0.015
    # GP training
    gp_iters: int = 50
    gp_step: float = 0.05
    # GA settings
    population: int = 50
    generations: int = 100
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    tournament_size: int = 3
    elitism_count: int = 2
    # fitness weights and budgets
    eta: float = 1.0
    mu: float = 0.1
    lam: float = 0.001
    gamma: float = DEFAULT_GAMMA
    dsp_budget: int = DEFAULT_DSP_BUDGET
    mem_budget: int = DEFAULT_MEM_BUDGET
    # pareto
    space_cap: int = 10**6
    epsilon: float = 1e-6

    def backbone(self) -> BackboneSpec:
        n = len(self.block_units)
        if not (len(self.out_channels) == len(self.features) == len(self.block_strides) == n):
            raise ConfigError("block_units/out_channels/features/block_strides lengths differ")
        if self.stem == "imagenet":
            half = -(-self.input_resolution // 2)
            quarter = -(-half // 2)
            stem = (
                LayerShape("conv", 3, self.stem_channels, self.input_resolution,
                           self.input_resolution, half, half, k=7, stride=2),
                LayerShape("pool", self.stem_channels, self.stem_channels,
                           half, half, quarter, quarter, k=3, stride=2),
            )
            stem_out = quarter
        elif self.stem == "small":
            half = -(-self.input_resolution // 2)
            stem = (
                LayerShape("conv", 3, self.stem_channels, self.input_resolution,
                           self.input_resolution, half, half, k=3, stride=2),
            )
            stem_out = half
        else:
            raise ConfigError(f"unknown stem kind {self.stem!r}")
        cur = stem_out
        for i, (f, s) in enumerate(zip(self.features, self.block_strides)):
            cur = -(-cur // s)
            if cur != f:
                raise ConfigError(
                    f"features[{i}]={f} inconsistent with stem/strides (expected {cur})"
                )
        blocks = tuple(
            BlockSpec(u, c, f, f, first_unit_stride=s, min_units=self.min_units)
            for u, c, f, s in zip(self.block_units, self.out_channels, self.features, self.block_strides)
        )
        try:
            return BackboneSpec(
                blocks=blocks,
                stem_layers=stem,
                input_resolution=self.input_resolution,
                data_width=self.data_width,
                num_classes=self.num_classes,
            )
        except SpaceError as exc:
            raise ConfigError(str(exc)) from exc

    def hw_domain(self) -> HwDomain:
        try:
            return HwDomain(
                pf=self.pf_domain, pc=self.pc_domain, pv=self.pv_domain,
                bw=self.bw_domain, mem=self.mem_domain,
            )
        except SpaceError as exc:
            raise ConfigError(str(exc)) from exc

    def oracle_settings(self) -> OracleSettings:
        return OracleSettings(
            clock_mhz=self.clock_mhz,
            static_power_w=self.static_power_w,
            dsp_power_w=self.dsp_power_w,
        )

    def ga_config(self, seed: int) -> GaConfig:
        return GaConfig(
            population_size=self.population,
            generations=self.generations,
            crossover_rate=self.crossover_rate,
            mutation_rate=self.mutation_rate,
            tournament_size=self.tournament_size,
            elitism_count=self.elitism_count,
            rng_seed=seed,
        )


_TUPLE_FIELDS = {
    "block_units", "out_channels", "features", "block_strides",
    "pf_domain", "pc_domain", "pv_domain", "bw_domain", "mem_domain",
}
_INT_FIELDS = {
    "min_units", "input_resolution", "data_width", "num_classes", "stem_channels",
    "sample_bw", "sample_mem", "gp_iters", "population", "generations",
    "tournament_size", "elitism_count", "dsp_budget", "mem_budget", "space_cap",
}
_FLOAT_FIELDS = {
    "clock_mhz", "static_power_w", "dsp_power_w", "gp_step", "crossover_rate",
    "mutation_rate", "eta", "mu", "lam", "gamma", "epsilon",
}
_STR_FIELDS = {"stem"}


def parse_config(path: str | Path | None) -> RunConfig:
    """Load a config file; None or a missing key falls back to the default."""
    cfg = RunConfig()
    if path is None:
        return cfg
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    known = {f.name for f in fields(RunConfig)}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in _TUPLE_FIELDS:
                parsed = tuple(int(v.strip()) for v in value.split(",") if v.strip())
            elif key in _INT_FIELDS:
                parsed = int(value)
            elif key in _FLOAT_FIELDS:
                parsed = float(value)
            elif key in _STR_FIELDS:
                parsed = value
            else:
                raise ConfigError(f"{path}:{lineno}: unhandled key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
        setattr(cfg, key, parsed)
    return cfg
