"""Genetic-algorithm exploration of the joint design space.

Minimizes the scalarized objective

    eta * CE + mu * Latency + lambda * Energy + penalty

where the penalty is 0 when both the DSP and buffer budgets are met and a
large constant gamma otherwise. CE/latency/energy come from pluggable
predictors (GP surrogates for search, raw oracles for validation); the
resource check always uses the analytic model.

Individuals are canonical CodesignPoints. Variation works on a flat gene
string of the per-cell ratios followed by PF, PC, PV; BW and MEM are
mutation-only genes that never cross over. Offspring are canonicalized, so
every individual ever evaluated is valid. All randomness flows from one
seeded generator in a fixed order, making runs reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .gp import GpModel, predict_mean
from .oracle import Oracle, dsp_usage, mem_usage
from .space import (
    RATIO_ALPHABET,
    BackboneSpec,
    CodesignPoint,
    HwConfig,
    HwDomain,
    arch_to_layers,
    canonicalize,
    encode16,
    encode19,
    sample_arch,
    sample_hw,
)

WEIGHT_PRESETS = {
    "A": (1.0, 0.2, 0.001),
    "B": (1.0, 0.1, 0.001),
    "C": (1.0, 0.05, 0.001),
}

DEFAULT_GAMMA = 1000.0
DEFAULT_DSP_BUDGET = 1518
DEFAULT_MEM_BUDGET = 4 * 2**20


class GaError(ValueError):
    pass


@dataclass(frozen=True)
class FitnessWeights:
    """Objective weights plus the resource budgets behind the penalty term."""

    eta: float
    mu: float
    lam: float
    gamma: float = DEFAULT_GAMMA
    dsp_avl: int = DEFAULT_DSP_BUDGET
    mem_avl: int = DEFAULT_MEM_BUDGET

    def __post_init__(self):
        if self.eta < 0 or self.mu < 0 or self.lam < 0:
            raise GaError("objective weights must be non-negative")
        if self.eta == 0 and self.mu == 0 and self.lam == 0:
            raise GaError("at least one objective weight must be positive")
        if self.gamma <= 0:
            raise GaError("gamma must be positive")

    @classmethod
    def preset(cls, name: str, **kwargs) -> "FitnessWeights":
        if name not in WEIGHT_PRESETS:
            raise GaError(f"unknown preset {name!r}; choose from {sorted(WEIGHT_PRESETS)}")
        eta, mu, lam = WEIGHT_PRESETS[name]
        return cls(eta, mu, lam, **kwargs)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    generations: int = 100
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    tournament_size: int = 3
    elitism_count: int = 2
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise GaError("population_size must be >= 2")
        if self.generations < 1:
            raise GaError("generations must be >= 1")
        if self.elitism_count >= self.population_size:
            raise GaError("elitism_count must be smaller than population_size")
        if self.elitism_count < 0 or self.tournament_size < 1:
            raise GaError("elitism_count and tournament_size must be non-negative")
        for rate in (self.crossover_rate, self.mutation_rate):
            if not 0.0 <= rate <= 1.0:
                raise GaError("rates must lie in [0, 1]")


@dataclass(frozen=True)
class Predictors:
    """Objective evaluators; each takes a CodesignPoint and returns a float."""

    ce: Callable[[CodesignPoint], float]
    latency: Callable[[CodesignPoint], float]
    energy: Callable[[CodesignPoint], float]


def oracle_predictors(oracle: Oracle) -> Predictors:
    """Ground-truth predictors straight from the analytic models."""
    return Predictors(
        ce=lambda p: oracle.objectives(p)[0],
        latency=lambda p: oracle.objectives(p)[1],
        energy=lambda p: oracle.objectives(p)[2],
    )


def gp_predictors(ce_model: GpModel, latency_model: GpModel, power_model: GpModel) -> Predictors:
    """Surrogate predictors over the 16/19-dim encodings of a point."""
    return Predictors(
        ce=lambda p: predict_mean(ce_model, encode16(p.arch))[0],
        latency=lambda p: predict_mean(latency_model, encode19(p))[0],
        energy=lambda p: predict_mean(power_model, encode19(p))[0],
    )


@dataclass
class GaResult:
    best_point: CodesignPoint
    best_fitness: float
    history: list[tuple[float, float]]
    evaluations: int
    all_penalized: bool = False


def resource_penalty(point: CodesignPoint, weights: FitnessWeights, backbone: BackboneSpec) -> float:
    """0 when both budgets hold (boundary inclusive), gamma when either is exceeded."""
    if dsp_usage(point.hw) > weights.dsp_avl:
        return weights.gamma
    report = mem_usage(arch_to_layers(point.arch, backbone), point.hw, backbone.data_width)
    if report.mem_used > weights.mem_avl:
        return weights.gamma
    return 0.0


def fitness(
    point: CodesignPoint,
    predictors: Predictors,
    weights: FitnessWeights,
    backbone: BackboneSpec,
) -> float:
    """Scalarized objective value of one candidate point."""
    return (
        weights.eta * predictors.ce(point)
        + weights.mu * predictors.latency(point)
        + weights.lam * predictors.energy(point)
        + resource_penalty(point, weights, backbone)
    )


class _Evaluator:
    """Fitness with the penalty's layer lowering memoized per architecture."""

    def __init__(self, predictors, weights, backbone):
        self.predictors = predictors
        self.weights = weights
        self.backbone = backbone
        self._oracle = Oracle(backbone)  # reuses its lowering cache
        self._mem_cache: dict[tuple, int] = {}

    def penalty(self, point: CodesignPoint) -> float:
        w = self.weights
        if dsp_usage(point.hw) > w.dsp_avl:
            return w.gamma
        key = (point.arch.ratios, point.hw.pf)
        mem_used = self._mem_cache.get(key)
        if mem_used is None:
            mem_used = mem_usage(
                self._oracle.layers(point.arch), point.hw, self.backbone.data_width
            ).mem_used
            self._mem_cache[key] = mem_used
        return w.gamma if mem_used > w.mem_avl else 0.0

    def __call__(self, point: CodesignPoint) -> tuple[float, bool]:
        pen = self.penalty(point)
        value = (
            self.weights.eta * self.predictors.ce(point)
            + self.weights.mu * self.predictors.latency(point)
            + self.weights.lam * self.predictors.energy(point)
            + pen
        )
        return value, pen > 0.0


def _tournament(rng, fits, size):
    contenders = rng.integers(0, len(fits), size=size)
    best = contenders[0]
    for c in contenders[1:]:
        if fits[c] < fits[best]:
            best = c
    return int(best)


def _mutate_hw_gene(rng, current, domain_values, rate):
    if rng.random() < rate:
        return domain_values[int(rng.integers(len(domain_values)))]
    return current


def run_ga(
    config: GaConfig,
    weights: FitnessWeights,
    predictors: Predictors,
    backbone: BackboneSpec,
    hw_domain: HwDomain,
) -> GaResult:
    """Evolve CodesignPoints; returns the best individual ever evaluated.

    Per generation: elites carried over unchanged, tournament selection,
    single-point crossover on the (ratios + PF/PC/PV) gene string, per-gene
    mutation by domain resampling, canonical repair. History records each
    generation's population (best, mean) fitness.
    """
    rng = np.random.default_rng(config.rng_seed)
    evaluate = _Evaluator(predictors, weights, backbone)
    cells = backbone.total_cells
    n_genes = cells + 3  # ratios then pf, pc, pv

    population = [
        CodesignPoint(sample_arch(rng, backbone), sample_hw(rng, hw_domain))
        for _ in range(config.population_size)
    ]
    results = [evaluate(p) for p in population]
    fits = [f for f, _ in results]
    evaluations = len(population)
    any_feasible = any(not pen for _, pen in results)

    best_idx = int(np.argmin(fits))
    best_point, best_fitness = population[best_idx], fits[best_idx]

    history: list[tuple[float, float]] = []
    for _ in range(config.generations):
        order = sorted(range(len(population)), key=lambda i: fits[i])
        next_pop = [population[order[i]] for i in range(config.elitism_count)]

        while len(next_pop) < config.population_size:
            i1 = _tournament(rng, fits, config.tournament_size)
            i2 = _tournament(rng, fits, config.tournament_size)
            p1, p2 = population[i1], population[i2]
            g1 = list(p1.arch.ratios) + [p1.hw.pf, p1.hw.pc, p1.hw.pv]
            g2 = list(p2.arch.ratios) + [p2.hw.pf, p2.hw.pc, p2.hw.pv]
            if rng.random() < config.crossover_rate:
                cut = int(rng.integers(1, n_genes))
                g1, g2 = g1[:cut] + g2[cut:], g2[:cut] + g1[cut:]
            for child_genes, parent in ((g1, p1), (g2, p2)):
                if len(next_pop) >= config.population_size:
                    break
                ratios = list(child_genes[:cells])
                for j in range(cells):
                    if rng.random() < config.mutation_rate:
                        ratios[j] = RATIO_ALPHABET[int(rng.integers(len(RATIO_ALPHABET)))]
                pf = _mutate_hw_gene(rng, child_genes[cells], hw_domain.pf, config.mutation_rate)
                pc = _mutate_hw_gene(rng, child_genes[cells + 1], hw_domain.pc, config.mutation_rate)
                pv = _mutate_hw_gene(rng, child_genes[cells + 2], hw_domain.pv, config.mutation_rate)
                bw = _mutate_hw_gene(rng, parent.hw.bw, hw_domain.bw, config.mutation_rate)
                mem = _mutate_hw_gene(rng, parent.hw.mem, hw_domain.mem, config.mutation_rate)
                next_pop.append(
                    CodesignPoint(
                        canonicalize(ratios, backbone),
                        HwConfig(int(pf), int(pc), int(pv), int(bw), int(mem)),
                    )
                )

        population = next_pop
        results = [evaluate(p) for p in population]
        fits = [f for f, _ in results]
        evaluations += len(population)
        any_feasible = any_feasible or any(not pen for _, pen in results)

        gen_best = int(np.argmin(fits))
        if fits[gen_best] < best_fitness:
            best_fitness = fits[gen_best]
            best_point = population[gen_best]
        history.append((float(fits[gen_best]), float(np.mean(fits))))

    return GaResult(
        best_point=best_point,
        best_fitness=float(best_fitness),
        history=history,
        evaluations=evaluations,
        all_penalized=not any_feasible,
    )
