"""Readers and writers for every file the tool produces.

Formats are plain text: comma-separated sample tables with a header row,
JSON documents for models and search results, and a whitespace-delimited
3-column plot file. Floats are serialized with ``repr``, the shortest
string that round-trips the exact double, so re-reading a file reproduces
the in-memory values bit for bit.

Sample schemas (one record per line):
    loss samples:  e0,...,e15,ce
    perf samples:  e0,...,e15,pf,pc,pv,bw,mem,latency_ms,power_w
bw/mem are carried for oracle reproducibility; the GP consumes only the
first 19 columns' worth of information.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gp import GpModel, KernelSpec, build_model
from .pareto import ParetoPoint
from .space import ArchEncoding, CodesignPoint, HwConfig, ENCODING_CELLS, encode16

LOSS_HEADER = [f"e{i}" for i in range(ENCODING_CELLS)] + ["ce"]
PERF_HEADER = [f"e{i}" for i in range(ENCODING_CELLS)] + [
    "pf", "pc", "pv", "bw", "mem", "latency_ms", "power_w",
]
FRONTIER_HEADER = [f"e{i}" for i in range(ENCODING_CELLS)] + [
    "pf", "pc", "pv", "bw", "mem", "ce", "latency_ms", "power_w", "on_frontier",
]

MODEL_FORMAT = "codesign-gp-model"


class FileFormatError(ValueError):
    """Raised on schema violations, with the offending row/column named."""


def fmt(x: float) -> str:
    return repr(float(x))


def _parse_float(token: str, path, row: int, col: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise FileFormatError(f"{path}: row {row}, column {col}: not a number: {token!r}")


def _check_header(got: list[str], expected: list[str], path) -> None:
    if got != expected:
        raise FileFormatError(
            f"{path}: bad header: expected {','.join(expected)!r}, got {','.join(got)!r}"
        )


def write_loss_samples(path, rows) -> None:
    """rows: iterable of (16-vector, ce)."""
    path = Path(path)
    lines = [",".join(LOSS_HEADER)]
    for vec, ce in rows:
        lines.append(",".join([fmt(v) for v in vec] + [fmt(ce)]))
    path.write_text("\n".join(lines) + "\n")


def read_loss_samples(path):
    """Returns (inputs (n, 16), targets (n,))."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}: empty file")
    _check_header(lines[0].split(","), LOSS_HEADER, path)
    X, y = [], []
    for i, line in enumerate(lines[1:], start=1):
        parts = line.split(",")
        if len(parts) != len(LOSS_HEADER):
            raise FileFormatError(
                f"{path}: row {i}: expected {len(LOSS_HEADER)} columns, got {len(parts)}"
            )
        X.append([_parse_float(t, path, i, LOSS_HEADER[j]) for j, t in enumerate(parts[:-1])])
        y.append(_parse_float(parts[-1], path, i, "ce"))
    return np.array(X), np.array(y)


def write_perf_samples(path, rows) -> None:
    """rows: iterable of (16-vector, HwConfig, latency_ms, power_w)."""
    path = Path(path)
    lines = [",".join(PERF_HEADER)]
    for vec, hw, lat, power in rows:
        record = [fmt(v) for v in vec]
        record += [str(hw.pf), str(hw.pc), str(hw.pv), str(hw.bw), str(hw.mem)]
        record += [fmt(lat), fmt(power)]
        lines.append(",".join(record))
    path.write_text("\n".join(lines) + "\n")


def read_perf_samples(path):
    """Returns (inputs (n, 19), hw rows (n, 5) ints, latency (n,), power (n,))."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}: empty file")
    _check_header(lines[0].split(","), PERF_HEADER, path)
    X, hw_rows, lat, power = [], [], [], []
    for i, line in enumerate(lines[1:], start=1):
        parts = line.split(",")
        if len(parts) != len(PERF_HEADER):
            raise FileFormatError(
                f"{path}: row {i}: expected {len(PERF_HEADER)} columns, got {len(parts)}"
            )
        vals = [_parse_float(t, path, i, PERF_HEADER[j]) for j, t in enumerate(parts)]
        X.append(vals[:16] + vals[16:19])  # e0..e15, pf, pc, pv
        hw_rows.append([int(v) for v in vals[16:21]])
        lat.append(vals[21])
        power.append(vals[22])
    return np.array(X), np.array(hw_rows, dtype=int), np.array(lat), np.array(power)


def save_model(path, model: GpModel) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": 1,
        "family": model.kernel.family,
        "lengthscales": model.kernel.lengthscales.tolist(),
        "signal_variance": model.kernel.signal_variance,
        "noise_variance": model.noise_variance,
        "constant_mean": model.constant_mean,
        "x_mean": model.x_mean.tolist(),
        "x_scale": model.x_scale.tolist(),
        "train_inputs": model.train_inputs.tolist(),
        "train_targets": model.train_targets.tolist(),
        "target_name": model.target_name,
        "degenerate": model.degenerate,
        "fit_log_likelihood": None if np.isnan(model.fit_log_likelihood) else model.fit_log_likelihood,
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_model(path) -> GpModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not valid JSON: {exc}") from exc
    if doc.get("format") != MODEL_FORMAT:
        raise FileFormatError(f"{path}: not a {MODEL_FORMAT} document")
    spec = KernelSpec(
        doc["family"], np.array(doc["lengthscales"]), doc["signal_variance"]
    )
    lml = doc.get("fit_log_likelihood")
    return build_model(
        np.array(doc["train_inputs"]),
        np.array(doc["train_targets"]),
        spec,
        noise_variance=doc["noise_variance"],
        constant_mean=doc["constant_mean"],
        x_mean=np.array(doc["x_mean"]),
        x_scale=np.array(doc["x_scale"]),
        target_name=doc.get("target_name", ""),
        degenerate=doc.get("degenerate", False),
        fit_log_likelihood=float("nan") if lml is None else lml,
    )


def write_explore_result(path, result: dict) -> None:
    Path(path).write_text(json.dumps(result, indent=1, sort_keys=True) + "\n")


def read_explore_result(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not valid JSON: {exc}") from exc


def write_frontier(path, points: list[ParetoPoint]) -> None:
    path = Path(path)
    lines = [",".join(FRONTIER_HEADER)]
    for p in points:
        vec = encode16(p.point.arch)
        hw = p.point.hw
        record = [fmt(v) for v in vec]
        record += [str(hw.pf), str(hw.pc), str(hw.pv), str(hw.bw), str(hw.mem)]
        record += [fmt(p.ce), fmt(p.latency_ms), fmt(p.energy), str(int(p.on_frontier))]
        lines.append(",".join(record))
    path.write_text("\n".join(lines) + "\n")


def read_frontier(path) -> list[ParetoPoint]:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}: empty file")
    _check_header(lines[0].split(","), FRONTIER_HEADER, path)
    out = []
    for i, line in enumerate(lines[1:], start=1):
        parts = line.split(",")
        if len(parts) != len(FRONTIER_HEADER):
            raise FileFormatError(
                f"{path}: row {i}: expected {len(FRONTIER_HEADER)} columns, got {len(parts)}"
            )
        vals = [_parse_float(t, path, i, FRONTIER_HEADER[j]) for j, t in enumerate(parts)]
        # the arch comes back 16-wide (padded); objectives drive re-fronting
        arch = ArchEncoding(tuple(vals[:16]))
        hw = HwConfig(*(int(v) for v in vals[16:21]))
        out.append(
            ParetoPoint(
                CodesignPoint(arch, hw),
                ce=vals[21],
                latency_ms=vals[22],
                energy=vals[23],
                on_frontier=bool(int(vals[24])),
            )
        )
    return out


def write_plot_data(path, points: list[ParetoPoint]) -> None:
    """3-column whitespace table (ce latency_ms power_w), one row per point."""
    lines = ["# ce latency_ms power_w"]
    for p in points:
        lines.append(" ".join([fmt(p.ce), fmt(p.latency_ms), fmt(p.energy)]))
    Path(path).write_text("\n".join(lines) + "\n")
