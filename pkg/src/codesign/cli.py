"""Command-line pipeline: sample -> fit -> explore -> pareto -> report.

Every command is reproducible byte-for-byte given the same config and seed.
Exit codes: 0 ok, 2 missing or invalid input, 3 infeasible search (every
candidate penalized), 4 design space over the enumeration cap.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import files
from .config import ConfigError, RunConfig, parse_config
from .ga import (
    FitnessWeights,
    WEIGHT_PRESETS,
    gp_predictors,
    oracle_predictors,
    run_ga,
)
from .gp import Dataset, GpError, evaluate_mae, fit, predict_mean
from .oracle import Oracle, dsp_usage, mem_usage
from .pareto import ParetoPoint, exhaustive_eval, pareto_front, verify_on_front
from .space import (
    CodesignPoint,
    HwConfig,
    SpaceError,
    SpaceTooLargeError,
    arch_to_layers,
    count_space,
    encode16,
    sample_arch,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_SPACE_TOO_LARGE = 4

# fixed split ratios: 1500/2000 for loss tables, 3000/4600 for perf tables
LOSS_TRAIN_NUM, LOSS_TRAIN_DEN = 3, 4
PERF_TRAIN_NUM, PERF_TRAIN_DEN = 3000, 4600

TARGET_FAMILIES = {"ce": "matern32", "latency_ms": "matern52", "power_w": "matern52"}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_BAD_INPUT):
        super().__init__(message)
        self.code = code


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise CliError(f"{what} not found: {p}")
    return p


def cmd_sample(args) -> int:
    cfg = parse_config(args.config)
    backbone = cfg.backbone()
    domain = cfg.hw_domain()
    oracle = Oracle(backbone, cfg.oracle_settings())
    rng = np.random.default_rng(args.seed)

    if args.loss_from:
        X, y = files.read_loss_samples(_require_file(args.loss_from, "loss sample file"))
        loss_rows = list(zip(X, y))
    else:
        loss_rows = []
        for _ in range(args.n_loss):
            arch = sample_arch(rng, backbone)
            loss_rows.append((encode16(arch), oracle.ce(arch)))
    files.write_loss_samples(args.out_loss, loss_rows)

    perf_rows = []
    for _ in range(args.n_hw):
        arch = sample_arch(rng, backbone)
        hw = HwConfig(
            pf=domain.pf[int(rng.integers(len(domain.pf)))],
            pc=domain.pc[int(rng.integers(len(domain.pc)))],
            pv=domain.pv[int(rng.integers(len(domain.pv)))],
            bw=cfg.sample_bw,
            mem=cfg.sample_mem,
        )
        perf = oracle.perf(CodesignPoint(arch, hw))
        perf_rows.append((encode16(arch), hw, perf.latency_ms, perf.power_w))
    files.write_perf_samples(args.out_perf, perf_rows)

    print(f"wrote {len(loss_rows)} loss samples to {args.out_loss}")
    print(f"wrote {len(perf_rows)} perf samples to {args.out_perf}")
    return EXIT_OK


def _split_indices(n: int, num: int, den: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    perm = np.random.default_rng(seed).permutation(n)
    train_n = (n * num) // den
    return perm[:train_n], perm[train_n:]


def cmd_fit(args) -> int:
    cfg = parse_config(args.config)
    path = _require_file(args.samples, "sample file")
    header = path.read_text().splitlines()[0].split(",") if path.stat().st_size else []
    target = args.target

    if header == files.LOSS_HEADER:
        if target != "ce":
            raise CliError(f"loss sample file only carries target 'ce', not {target!r}")
        X, y = files.read_loss_samples(path)
        num, den = LOSS_TRAIN_NUM, LOSS_TRAIN_DEN
    elif header == files.PERF_HEADER:
        if target not in ("latency_ms", "power_w"):
            raise CliError(f"perf sample file carries latency_ms/power_w, not {target!r}")
        X, _, lat, power = files.read_perf_samples(path)
        y = lat if target == "latency_ms" else power
        num, den = PERF_TRAIN_NUM, PERF_TRAIN_DEN
    else:
        raise CliError(f"{path}: unrecognized sample schema")

    if len(y) < 2:
        raise CliError(f"{path}: need at least 2 samples to fit, got {len(y)}")
    train_idx, test_idx = _split_indices(len(y), num, den, args.seed)
    family = args.family or TARGET_FAMILIES[target]
    model = fit(
        Dataset(X[train_idx], y[train_idx], target),
        family=family,
        iters=args.iters if args.iters is not None else cfg.gp_iters,
        step_size=cfg.gp_step,
        rng_seed=args.seed,
    )
    files.save_model(args.out, model)

    if len(test_idx):
        test = Dataset(X[test_idx], y[test_idx], target)
        mae = evaluate_mae(model, test)
        baseline = float(np.mean(np.abs(y[train_idx].mean() - y[test_idx])))
        std = float(y[test_idx].std())
        print(
            f"target={target} family={family} train={len(train_idx)} test={len(test_idx)} "
            f"mae={mae:.6g} test_std={std:.6g} baseline_mae={baseline:.6g}"
        )
    else:
        print(f"target={target} family={family} train={len(train_idx)} test=0")
    print(f"wrote model to {args.out}")
    return EXIT_OK


def _weights_from_args(args, cfg: RunConfig) -> FitnessWeights:
    eta, mu, lam = cfg.eta, cfg.mu, cfg.lam
    if args.preset:
        eta, mu, lam = WEIGHT_PRESETS[args.preset]
    if args.weights:
        parts = args.weights.split(",")
        if len(parts) != 3:
            raise CliError(f"--weights expects 'eta,mu,lambda', got {args.weights!r}")
        eta, mu, lam = (float(p) for p in parts)
    return FitnessWeights(
        eta, mu, lam,
        gamma=args.gamma if args.gamma is not None else cfg.gamma,
        dsp_avl=args.dsp_budget if args.dsp_budget is not None else cfg.dsp_budget,
        mem_avl=args.mem_budget if args.mem_budget is not None else cfg.mem_budget,
    )


def cmd_explore(args) -> int:
    cfg = parse_config(args.config)
    backbone = cfg.backbone()
    domain = cfg.hw_domain()
    oracle = Oracle(backbone, cfg.oracle_settings())
    weights = _weights_from_args(args, cfg)

    if args.oracle:
        predictors = oracle_predictors(oracle)
        predictor_kind = "oracle"
    else:
        for name, p in (("--ce-model", args.ce_model),
                        ("--latency-model", args.latency_model),
                        ("--power-model", args.power_model)):
            if not p:
                raise CliError(f"{name} is required unless --oracle is given")
        ce_m = files.load_model(_require_file(args.ce_model, "ce model file"))
        lat_m = files.load_model(_require_file(args.latency_model, "latency model file"))
        pw_m = files.load_model(_require_file(args.power_model, "power model file"))
        predictors = gp_predictors(ce_m, lat_m, pw_m)
        predictor_kind = "gp"

    result = run_ga(cfg.ga_config(args.seed), weights, predictors, backbone, domain)
    if result.all_penalized:
        raise CliError(
            "search infeasible: every evaluated design exceeded the resource budgets",
            code=EXIT_INFEASIBLE,
        )

    best = result.best_point
    predicted = {
        "ce": predictors.ce(best),
        "latency_ms": predictors.latency(best),
        "power_w": predictors.energy(best),
    }
    ce, lat, power = oracle.objectives(best)
    report = mem_usage(arch_to_layers(best.arch, backbone), best.hw, backbone.data_width)
    doc = {
        "arch_ratios": list(best.arch.ratios),
        "hw": {"pf": best.hw.pf, "pc": best.hw.pc, "pv": best.hw.pv,
               "bw": best.hw.bw, "mem": best.hw.mem},
        "predictor": predictor_kind,
        "weights": {"eta": weights.eta, "mu": weights.mu, "lambda": weights.lam,
                    "gamma": weights.gamma, "dsp_budget": weights.dsp_avl,
                    "mem_budget": weights.mem_avl},
        "predicted": predicted,
        "oracle": {"ce": ce, "latency_ms": lat, "power_w": power},
        "resources": {"dsp_used": report.dsp_used, "mem_used": report.mem_used},
        "fitness": result.best_fitness,
        "history": [[b, m] for b, m in result.history],
        "evaluations": result.evaluations,
        "seed": args.seed,
    }
    files.write_explore_result(args.out, doc)
    print(
        f"best fitness {result.best_fitness:.6g} "
        f"(ce {ce:.4g}, latency {lat:.4g} ms, power {power:.4g} W) -> {args.out}"
    )
    return EXIT_OK


def cmd_pareto(args) -> int:
    cfg = parse_config(args.config)
    backbone = cfg.backbone()
    domain = cfg.hw_domain()
    oracle = Oracle(backbone, cfg.oracle_settings())
    cap = args.cap if args.cap is not None else cfg.space_cap
    try:
        points = exhaustive_eval(backbone, domain, oracle, cap=cap)
    except SpaceTooLargeError as exc:
        raise CliError(str(exc), code=EXIT_SPACE_TOO_LARGE)
    frontier = [p for p in points if p.on_frontier]
    files.write_frontier(args.out_frontier, frontier)
    files.write_plot_data(args.out_plot, points)
    print(f"evaluated {len(points)} points, frontier size {len(frontier)}")
    print(f"wrote frontier to {args.out_frontier}, plot data to {args.out_plot}")
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = parse_config(args.config)
    frontier = None
    if args.frontier:
        frontier = files.read_frontier(_require_file(args.frontier, "frontier file"))
        frontier = [p for p in frontier if p.on_frontier]
    lines = []
    for result_path in args.result:
        doc = files.read_explore_result(_require_file(result_path, "result file"))
        w = doc["weights"]
        lines.append(f"result {Path(result_path).name}")
        lines.append(
            f"  weights eta={w['eta']} mu={w['mu']} lambda={w['lambda']}"
        )
        lines.append(
            "  hw pf=%(pf)d pc=%(pc)d pv=%(pv)d bw=%(bw)d mem=%(mem)d" % doc["hw"]
        )
        o = doc["oracle"]
        lines.append(
            f"  oracle ce={o['ce']:.6g} latency_ms={o['latency_ms']:.6g} "
            f"power_w={o['power_w']:.6g} fitness={doc['fitness']:.6g}"
        )
        r = doc["resources"]
        lines.append(
            f"  resources dsp_used={r['dsp_used']} (budget {w['dsp_budget']}) "
            f"mem_used={r['mem_used']} (budget {w['mem_budget']})"
        )
        if frontier is not None:
            cand = ParetoPoint(None, o["ce"], o["latency_ms"], o["power_w"])
            ok = verify_on_front(cand, frontier, cfg.epsilon)
            lines.append(f"  on_reference_frontier={ok}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codesign",
        description="architecture/accelerator co-design: sample, fit, explore, validate",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw oracle-evaluated loss and perf sample files")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-loss", type=int, default=2000)
    p.add_argument("--n-hw", type=int, default=4600)
    p.add_argument("--out-loss", default="loss_samples.csv")
    p.add_argument("--out-perf", default="perf_samples.csv")
    p.add_argument("--loss-from", default=None,
                   help="ingest an existing loss-sample file instead of the synthetic oracle")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fit", help="train a GP surrogate from a sample file")
    p.add_argument("--config", default=None)
    p.add_argument("--samples", required=True)
    p.add_argument("--target", required=True, choices=sorted(TARGET_FAMILIES))
    p.add_argument("--family", choices=("matern32", "matern52"), default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("explore", help="run the genetic search")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", action="store_true",
                   help="use the analytic oracles instead of GP models")
    p.add_argument("--ce-model", default=None)
    p.add_argument("--latency-model", default=None)
    p.add_argument("--power-model", default=None)
    p.add_argument("--preset", choices=sorted(WEIGHT_PRESETS), default=None)
    p.add_argument("--weights", default=None, help="eta,mu,lambda")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--dsp-budget", type=int, default=None)
    p.add_argument("--mem-budget", type=int, default=None)
    p.add_argument("--out", default="explore_result.json")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("pareto", help="exhaustively evaluate a reduced space")
    p.add_argument("--config", default=None)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--out-frontier", default="frontier.csv")
    p.add_argument("--out-plot", default="plot_data.txt")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("report", help="summarize explore results, optionally against a frontier")
    p.add_argument("--config", default=None)
    p.add_argument("--result", nargs="+", required=True)
    p.add_argument("--frontier", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, files.FileFormatError, GpError, SpaceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
