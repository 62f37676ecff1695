# Validate the search against ground truth: enumerate a reduced space,
# extract the reference Pareto frontier, and confirm the GA picks lie on it.

from codesign.ga import FitnessWeights, GaConfig, oracle_predictors, run_ga
from codesign.oracle import Oracle
from codesign.pareto import ParetoPoint, exhaustive_eval, pareto_front, verify_on_front
from codesign.space import BackboneSpec, BlockSpec, HwDomain, LayerShape

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

points = exhaustive_eval(backbone, domain, oracle)
frontier = [p for p in points if p.on_frontier]
print(f"exhaustively evaluated {len(points)} co-design points")
print(f"reference Pareto frontier holds {len(frontier)} of them")

lo = min(frontier, key=lambda p: p.ce)
fast = min(frontier, key=lambda p: p.latency_ms)
cool = min(frontier, key=lambda p: p.energy)
print(f"  lowest loss     : ce {lo.ce:.3f}, {lo.latency_ms:.3f} ms, {lo.energy:.2f} W")
print(f"  lowest latency  : ce {fast.ce:.3f}, {fast.latency_ms:.3f} ms, {fast.energy:.2f} W")
print(f"  lowest power    : ce {cool.ce:.3f}, {cool.latency_ms:.3f} ms, {cool.energy:.2f} W")

print("\nGA results under the three presets, checked against the frontier:")
predictors = oracle_predictors(oracle)
for preset in ("A", "B", "C"):
    weights = FitnessWeights.preset(preset)
    result = run_ga(GaConfig(rng_seed=0), weights, predictors, backbone, domain)
    ce, lat, power = oracle.objectives(result.best_point)
    candidate = ParetoPoint(result.best_point, ce, lat, power)
    ok = verify_on_front(candidate, frontier, epsilon=1e-6)
    print(f"  preset {preset}: ce {ce:.3f}, {lat:.3f} ms, {power:.2f} W -> on frontier: {ok}")

# the frontier is stable under re-extraction
again = pareto_front(frontier)
print(f"\nre-fronting the frontier returns the same {len(again)} points (idempotent)")
