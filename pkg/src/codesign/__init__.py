"""Joint CNN-architecture / accelerator-configuration search toolkit.

Submodules:
    space   -- the joint design space: types, validation, sampling, encodings
    oracle  -- analytic resource/latency/power models and the synthetic loss
    gp      -- exact Gaussian-process surrogates (Matern 3/2 and 5/2, ARD)
    ga      -- genetic search under the resource-penalized scalar fitness
    pareto  -- exhaustive evaluation and reference-frontier validation
    config  -- run configuration with full-scale default values
    files   -- sample/model/result file formats
    cli     -- the `codesign` command-line pipeline
"""

from .space import (
    ArchEncoding,
    BackboneSpec,
    BlockSpec,
    CodesignPoint,
    HwConfig,
    HwDomain,
    LayerShape,
    canonicalize,
    count_space,
    default_backbone,
    default_hw_domain,
    encode16,
    encode19,
    enumerate_hw_configs,
    random_arch,
)
from .oracle import Oracle, OracleSettings, dsp_usage, latency_ms, mem_usage, power_w, synthetic_ce
from .gp import Dataset, GpModel, KernelSpec, evaluate_mae, fit, kernel_eval, predict_mean
from .ga import FitnessWeights, GaConfig, GaResult, fitness, oracle_predictors, gp_predictors, resource_penalty, run_ga
from .pareto import ParetoPoint, dominates, exhaustive_eval, pareto_front, verify_on_front

__version__ = "0.1.0"
