"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. The heavyweight surrogate-quality criterion fits three
full-size GPs and takes a few minutes; everything else is fast.
"""

import math
import time

import numpy as np
import pytest

from codesign import files, gp
from codesign.cli import main as cli_main
from codesign.ga import FitnessWeights, GaConfig, oracle_predictors, run_ga
from codesign.oracle import Oracle, dsp_usage, mem_usage, synthetic_ce
from codesign.pareto import ParetoPoint, pareto_front, exhaustive_eval, verify_on_front
from codesign.space import (
    BackboneSpec,
    BlockSpec,
    CodesignPoint,
    HwConfig,
    HwDomain,
    LayerShape,
    arch_to_layers,
    count_space,
    default_backbone,
    default_hw_domain,
    encode16,
    encode19,
    enumerate_hw_configs,
    sample_arch,
    sample_hw,
)

MEM = 4 * 2**20


def report(name: str, ok: bool, detail: str, elapsed: float, budget: float):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    print(f"ACCEPTANCE {name}: {status} ({detail}; {elapsed:.1f}s of {budget:.0f}s budget)")
    assert ok, f"{name}: {detail}"
    assert elapsed < budget, f"{name}: took {elapsed:.1f}s, budget {budget:.0f}s"


def reduced_backbone() -> BackboneSpec:
    # 2 blocks of up to 3 units at full ImageNet feature scale: latency spans
    # a wide enough range that the three weight presets pick distinct designs
    stem = (
        LayerShape("conv", 3, 64, 224, 224, 112, 112, k=7, stride=2),
        LayerShape("pool", 64, 64, 112, 112, 56, 56, k=3, stride=2),
    )
    return BackboneSpec(
        blocks=(
            BlockSpec(3, 256, 56, 56, first_unit_stride=1),
            BlockSpec(3, 512, 28, 28, first_unit_stride=2),
        ),
        stem_layers=stem,
        input_resolution=224,
        num_classes=1000,
    )


REDUCED_DOMAIN = HwDomain(pf=(8, 32, 128), pc=(8, 32, 128), pv=(4, 16), bw=(64,), mem=(MEM,))

_shared: dict = {}


def reduced_space_state():
    """Exhaustive table, frontier, and per-preset GA results; built once."""
    if _shared:
        return _shared
    bb = reduced_backbone()
    oracle = Oracle(bb)
    table = exhaustive_eval(bb, REDUCED_DOMAIN, oracle)
    frontier = [p for p in table if p.on_frontier]
    predictors = oracle_predictors(oracle)

    mins, ga_runs = {}, {}
    for preset in ("A", "B", "C"):
        w = FitnessWeights.preset(preset)
        fits = []
        for p in table:
            pen = 0.0
            if dsp_usage(p.point.hw) > w.dsp_avl:
                pen = w.gamma
            else:
                used = mem_usage(arch_to_layers(p.point.arch, bb), p.point.hw, 1).mem_used
                if used > w.mem_avl:
                    pen = w.gamma
            fits.append(w.eta * p.ce + w.mu * p.latency_ms + w.lam * p.energy + pen)
        mins[preset] = min(fits)
        ga_runs[preset] = [
            run_ga(GaConfig(rng_seed=seed), w, predictors, bb, REDUCED_DOMAIN)
            for seed in range(10)
        ]
    _shared.update(
        backbone=bb, oracle=oracle, table=table, frontier=frontier,
        predictors=predictors, mins=mins, ga_runs=ga_runs,
    )
    return _shared


class TestAcceptance:
    def test_c1_space_counting(self):
        t0 = time.perf_counter()
        bb = default_backbone()
        hw_count = len(enumerate_hw_configs(default_hw_domain()))
        arch_count = count_space(bb, None, "ratio_only")
        joint = count_space(bb, default_hw_domain(), "ratio_only")
        ok = hw_count == 300 and arch_count == 43_046_721 and joint == 12_914_016_300
        report(
            "space-counting", ok,
            f"hw={hw_count}, arch={arch_count}, joint={joint}",
            time.perf_counter() - t0, 1.0,
        )

    def test_c2_resource_model_vs_brute_force(self):
        t0 = time.perf_counter()
        bb = default_backbone()
        dom = default_hw_domain()
        rng = np.random.default_rng(1234)
        mismatches = 0
        for _ in range(1000):
            arch = sample_arch(rng, bb)
            hw = sample_hw(rng, dom)
            layers = arch_to_layers(arch, bb)
            got = mem_usage(layers, hw, bb.data_width)
            # independent brute-force walk
            bf_in = bf_w = 0
            for l in layers:
                if l.kind != "conv":
                    continue
                bf_in = max(bf_in, l.c_in * l.h_in * l.w_in * bb.data_width)
                bf_w = max(bf_w, l.c_in * hw.pf * l.k * l.k * bb.data_width)
            bf_dsp = hw.pf * hw.pc * hw.pv // 2
            if (got.dsp_used, got.mem_in, got.mem_weight, got.mem_used) != (
                bf_dsp, bf_in, bf_w, 2 * (bf_in + bf_w),
            ):
                mismatches += 1
            if dsp_usage(hw) != bf_dsp:
                mismatches += 1
        report(
            "resource-model", mismatches == 0,
            f"{mismatches} mismatches over 1000 random points",
            time.perf_counter() - t0, 5.0,
        )

    def test_c3_gp_correctness(self):
        t0 = time.perf_counter()
        rng = np.random.default_rng(77)
        worst_rel = 0.0
        for i in range(20):
            n = int(rng.integers(8, 31))
            d = int(rng.integers(2, 20))
            family = "matern32" if i % 2 == 0 else "matern52"
            X = rng.normal(size=(n, d))
            y = rng.normal(size=n)
            spec = gp.KernelSpec(family, np.exp(0.3 * rng.normal(size=d)), float(rng.uniform(0.5, 2)))
            noise = float(rng.uniform(0.05, 0.4))
            mean = float(rng.normal())
            model = gp.build_model(X, y, spec, noise, mean)
            _, grad = gp.log_marginal_likelihood(model)

            theta = np.concatenate([np.log(spec.lengthscales), [math.log(spec.signal_variance)],
                                    [math.log(noise)], [mean]])

            def value(th):
                s = gp.KernelSpec(family, np.exp(th[:d]), math.exp(th[d]))
                m = gp.build_model(X, y, s, math.exp(th[d + 1]), th[d + 2],
                                   x_mean=model.x_mean, x_scale=model.x_scale)
                return gp.log_marginal_likelihood(m)[0]

            eps = 1e-5
            for j in range(theta.size):
                hi, lo = theta.copy(), theta.copy()
                hi[j] += eps
                lo[j] -= eps
                fd = (value(hi) - value(lo)) / (2 * eps)
                rel = abs(grad[j] - fd) / max(abs(fd), 1e-8)
                worst_rel = max(worst_rel, rel)
        grad_ok = worst_rel <= 1e-4

        # exact interpolation at noise 1e-6
        worst_interp = 0.0
        for i in range(10):
            n, d = 30, int(rng.integers(2, 8))
            X = rng.uniform(size=(n, d))
            y = np.sin(3 * X[:, 0]) + X @ rng.normal(size=d) * 0.3
            spec = gp.KernelSpec("matern52", 0.7 * np.ones(d), max(float(y.var()), 0.5))
            model = gp.build_model(X, y, spec, 1e-6, float(y.mean()))
            pred, _ = gp.predict_mean(model, X)
            worst_interp = max(worst_interp, float(np.max(np.abs(pred - y))))
        interp_ok = worst_interp <= 1e-3
        report(
            "gp-correctness", grad_ok and interp_ok,
            f"max grad rel err {worst_rel:.2e} (<=1e-4), max interp err {worst_interp:.2e} (<=1e-3)",
            time.perf_counter() - t0, 30.0,
        )

    def test_c4_gp_surrogate_quality(self):
        t0 = time.perf_counter()
        bb = default_backbone()
        dom = default_hw_domain()
        oracle = Oracle(bb)
        rng = np.random.default_rng(2024)

        X16 = np.zeros((2000, 16))
        y_ce = np.zeros(2000)
        for i in range(2000):
            arch = sample_arch(rng, bb)
            X16[i] = encode16(arch)
            y_ce[i] = oracle.ce(arch)

        X19 = np.zeros((4600, 19))
        y_lat = np.zeros(4600)
        y_pow = np.zeros(4600)
        for i in range(4600):
            arch = sample_arch(rng, bb)
            hw = HwConfig(
                pf=dom.pf[int(rng.integers(len(dom.pf)))],
                pc=dom.pc[int(rng.integers(len(dom.pc)))],
                pv=dom.pv[int(rng.integers(len(dom.pv)))],
                bw=256, mem=MEM,  # held fixed: the 19-dim encoding omits bw/mem
            )
            point = CodesignPoint(arch, hw)
            X19[i] = encode19(point)
            _, y_lat[i], y_pow[i] = oracle.objectives(point)

        split_rng = np.random.default_rng(7)
        results = {}
        cases = [
            ("ce", X16, y_ce, "matern32", 1500),
            ("latency_ms", X19, y_lat, "matern52", 3000),
            ("power_w", X19, y_pow, "matern52", 3000),
        ]
        for name, X, y, family, train_n in cases:
            perm = split_rng.permutation(len(y))
            tr, te = perm[:train_n], perm[train_n:]
            model = gp.fit(gp.Dataset(X[tr], y[tr], name), family=family, iters=50, step_size=0.05)
            mae = gp.evaluate_mae(model, gp.Dataset(X[te], y[te], name))
            std = float(y[te].std())
            baseline = float(np.mean(np.abs(y[tr].mean() - y[te])))
            results[name] = (mae, std, baseline, len(tr), len(te))

        ok = True
        details = []
        for name, (mae, std, baseline, ntr, nte) in results.items():
            this_ok = mae <= 0.10 * std and mae <= 0.50 * baseline
            ok = ok and this_ok
            details.append(f"{name}[{ntr}/{nte}] mae={mae:.4g} ({mae/std:.1%} of std, {mae/baseline:.1%} of baseline)")
        report("gp-surrogate-quality", ok, "; ".join(details), time.perf_counter() - t0, 600.0)

    def test_c5_ga_optimality(self):
        t0 = time.perf_counter()
        state = reduced_space_state()
        ok = True
        details = []
        for preset in ("A", "B", "C"):
            best = state["mins"][preset]
            hits = sum(
                1 for res in state["ga_runs"][preset]
                if res.best_fitness <= best * 1.01
            )
            details.append(f"{preset}: {hits}/10 within 1% of {best:.5g}")
            ok = ok and hits >= 9
        report("ga-optimality", ok, "; ".join(details), time.perf_counter() - t0, 120.0)

    def test_c6_pareto_consistency(self):
        t0 = time.perf_counter()
        state = reduced_space_state()
        oracle = state["oracle"]
        frontier = state["frontier"]

        onfront_ok = True
        for preset in ("A", "B", "C"):
            res = state["ga_runs"][preset][0]
            ce, lat, power = oracle.objectives(res.best_point)
            cand = ParetoPoint(res.best_point, ce, lat, power)
            if not verify_on_front(cand, frontier, epsilon=1e-6):
                onfront_ok = False

        # frontier extraction vs the independent quadratic oracle
        rng = np.random.default_rng(99)
        pts = [ParetoPoint(None, *rng.integers(0, 15, size=3).tolist()) for _ in range(1000)]
        fast = sorted(p.objectives for p in pareto_front(pts))
        slow = []
        for i, a in enumerate(pts):
            dominated = False
            for j, b in enumerate(pts):
                if i != j and all(x <= y for x, y in zip(b.objectives, a.objectives)) \
                        and any(x < y for x, y in zip(b.objectives, a.objectives)):
                    dominated = True
                    break
            if not dominated:
                slow.append(a.objectives)
        front_ok = fast == sorted(slow)
        report(
            "pareto-consistency", onfront_ok and front_ok,
            f"GA presets on frontier: {onfront_ok}, front matches O(n^2) oracle: {front_ok}",
            time.perf_counter() - t0, 60.0,
        )

    def test_c7_budget_feasibility(self):
        t0 = time.perf_counter()
        state = reduced_space_state()
        bb = state["backbone"]
        predictors = state["predictors"]
        # default budgets leave plenty of feasible configs (e.g. pf=pc=8, pv=4)
        w = FitnessWeights(1.0, 0.1, 0.001, gamma=1000.0, dsp_avl=1518, mem_avl=MEM)
        violations = 0
        for seed in range(20):
            cfg = GaConfig(population_size=24, generations=20, rng_seed=seed)
            res = run_ga(cfg, w, predictors, bb, REDUCED_DOMAIN)
            used_dsp = dsp_usage(res.best_point.hw)
            used_mem = mem_usage(
                arch_to_layers(res.best_point.arch, bb), res.best_point.hw, bb.data_width
            ).mem_used
            if used_dsp > w.dsp_avl or used_mem > w.mem_avl or res.all_penalized:
                violations += 1
        report(
            "budget-feasibility", violations == 0,
            f"{violations} budget violations over 20 seeds",
            time.perf_counter() - t0, 120.0,
        )

    def test_c8_reproducibility(self, tmp_path):
        t0 = time.perf_counter()
        cfg_path = tmp_path / "reduced.cfg"
        cfg_path.write_text(
            "block_units = 3,3\nout_channels = 64,128\nfeatures = 16,8\n"
            "block_strides = 1,2\ninput_resolution = 32\nnum_classes = 10\n"
            "stem = small\nstem_channels = 16\n"
            "pf_domain = 8,32,128\npc_domain = 8,32,128\npv_domain = 4,16\n"
            "bw_domain = 64\nsample_bw = 64\npopulation = 20\ngenerations = 20\n"
        )

        def pipeline(tag: str) -> dict[str, bytes]:
            d = tmp_path / tag
            d.mkdir()
            loss, perf = d / "loss.csv", d / "perf.csv"
            assert cli_main(["sample", "--config", str(cfg_path), "--seed", "3",
                             "--n-loss", "150", "--n-hw", "180",
                             "--out-loss", str(loss), "--out-perf", str(perf)]) == 0
            models = {}
            for target, src in (("ce", loss), ("latency_ms", perf), ("power_w", perf)):
                out = d / f"{target}.json"
                assert cli_main(["fit", "--config", str(cfg_path), "--samples", str(src),
                                 "--target", target, "--seed", "1", "--out", str(out)]) == 0
                models[target] = out
            result = d / "result.json"
            assert cli_main(["explore", "--config", str(cfg_path), "--seed", "5",
                             "--ce-model", str(models["ce"]),
                             "--latency-model", str(models["latency_ms"]),
                             "--power-model", str(models["power_w"]),
                             "--preset", "B", "--out", str(result)]) == 0
            frontier, plot = d / "frontier.csv", d / "plot.txt"
            assert cli_main(["pareto", "--config", str(cfg_path),
                             "--out-frontier", str(frontier), "--out-plot", str(plot)]) == 0
            rpt = d / "report.txt"
            assert cli_main(["report", "--config", str(cfg_path), "--result", str(result),
                             "--frontier", str(frontier), "--out", str(rpt)]) == 0
            return {p.name: p.read_bytes() for p in (loss, perf, *models.values(), result, frontier, plot, rpt)}

        first = pipeline("run1")
        second = pipeline("run2")
        byte_identical = first == second

        model = files.load_model(tmp_path / "run1" / "ce.json")
        resaved = tmp_path / "resaved.json"
        files.save_model(resaved, model)
        reloaded = files.load_model(resaved)
        bb = reduced_backbone()
        rng = np.random.default_rng(0)
        queries = np.array([encode16(sample_arch(rng, bb)) for _ in range(100)])
        p1, _ = gp.predict_mean(model, queries)
        p2, _ = gp.predict_mean(reloaded, queries)
        round_trip_ok = float(np.max(np.abs(p1 - p2))) <= 1e-12

        report(
            "reproducibility", byte_identical and round_trip_ok,
            f"byte-identical files: {byte_identical}, model round-trip <=1e-12: {round_trip_ok}",
            time.perf_counter() - t0, 300.0,
        )
