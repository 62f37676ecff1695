# Genetic search on a reduced joint space under the three weight presets.
# Heavier latency weight (preset A) trades network capacity for speed.

from codesign.ga import FitnessWeights, GaConfig, oracle_predictors, run_ga
from codesign.oracle import Oracle, dsp_usage
from codesign.space import BackboneSpec, BlockSpec, HwDomain, LayerShape, unit_counts

stem = (
    LayerShape("conv", 3, 64, 224, 224, 112, 112, k=7, stride=2),
    LayerShape("pool", 64, 64, 112, 112, 56, 56, k=3, stride=2),
)
backbone = BackboneSpec(
    blocks=(
        BlockSpec(3, 256, 56, 56, first_unit_stride=1),
        BlockSpec(3, 512, 28, 28, first_unit_stride=2),
    ),
    stem_layers=stem,
    input_resolution=224,
    num_classes=1000,
)
domain = HwDomain(pf=(8, 32, 128), pc=(8, 32, 128), pv=(4, 16), bw=(64,), mem=(4 * 2**20,))
oracle = Oracle(backbone)
predictors = oracle_predictors(oracle)

print("preset  eta   mu    lambda |   fitness  ce     lat_ms  power_W | units  hw (pf,pc,pv)")
for preset in ("A", "B", "C"):
    weights = FitnessWeights.preset(preset)
    result = run_ga(GaConfig(rng_seed=0), weights, predictors, backbone, domain)
    ce, lat, power = oracle.objectives(result.best_point)
    hw = result.best_point.hw
    print(f"{preset:>6}  {weights.eta:<4}  {weights.mu:<4}  {weights.lam:<6} | "
          f"{result.best_fitness:9.4f}  {ce:.3f}  {lat:7.4f}  {power:7.2f} | "
          f"{unit_counts(result.best_point.arch, backbone)}  ({hw.pf},{hw.pc},{hw.pv})"
          f"  dsp={dsp_usage(hw)}")

print("\nconvergence of the preset-B run (population best per generation):")
weights = FitnessWeights.preset("B")
result = run_ga(GaConfig(rng_seed=0), weights, predictors, backbone, domain)
for g in range(0, len(result.history), 10):
    best, mean = result.history[g]
    print(f"  gen {g:>3}: best {best:.4f}  population mean {mean:8.2f}")
print(f"  total fitness evaluations: {result.evaluations}")
